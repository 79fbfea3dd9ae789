#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "gpo/errors.hpp"
#include "gpo/problems.hpp"
#include "gpo/text.hpp"

namespace gpo {

void write_scheduling_instance(std::ostream& out, const SchedulingInstance& inst) {
  out << "K=" << inst.K << '\n'
      << "travel=" << text::join_ints(inst.travel) << '\n'
      << "open=" << text::join_ints(inst.open) << '\n'
      << "lower=" << text::join_ints(inst.lower) << '\n'
      << "upper=" << text::join_ints(inst.upper) << '\n';
}

SchedulingInstance read_scheduling_instance(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key(text::trim(t.substr(0, eq)));
    if (!kv.emplace(key, std::string(t.substr(eq + 1))).second) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  for (const char* key : {"K", "travel", "open", "lower", "upper"}) {
    if (!kv.count(key)) throw Error(ErrorCode::ParseError, std::string("missing key '") + key + "'");
  }
  if (kv.size() != 5) throw Error(ErrorCode::ParseError, "unexpected keys in scheduling instance");
  SchedulingInstance inst;
  inst.K = static_cast<int>(text::parse_int(kv["K"]));
  inst.travel = text::parse_int_list(kv["travel"]);
  inst.open = text::parse_int_list(kv["open"]);
  inst.lower = text::parse_int_list(kv["lower"]);
  inst.upper = text::parse_int_list(kv["upper"]);
  inst.validate();
  return inst;
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "n=" << g.num_vertices() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph read_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  int n = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (n < 0) {
      if (t.substr(0, 2) != "n=") {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected header n=<int>");
      }
      n = static_cast<int>(text::parse_int(t.substr(2)));
      continue;
    }
    auto sp = t.find(' ');
    if (sp == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'u v'");
    }
    edges.emplace_back(static_cast<int>(text::parse_int(t.substr(0, sp))),
                       static_cast<int>(text::parse_int(t.substr(sp + 1))));
  }
  if (n < 0) throw Error(ErrorCode::ParseError, "missing header n=<int>");
  return Graph(n, std::move(edges));
}

}  // namespace gpo
