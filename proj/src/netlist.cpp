#include "apx/netlist.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "apx/error.hpp"

namespace apx {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Input: return "input";
    case NodeKind::Add: return "add";
    case NodeKind::Sub: return "sub";
    case NodeKind::MulConst: return "mul";
    case NodeKind::Delay: return "delay";
    case NodeKind::Output: return "output";
  }
  return "?";
}

namespace {

std::size_t expected_arity(NodeKind kind) {
  switch (kind) {
    case NodeKind::Input: return 0;
    case NodeKind::Add:
    case NodeKind::Sub: return 2;
    default: return 1;
  }
}

bool is_power_of_two(std::int64_t v) { return v > 0 && std::has_single_bit(static_cast<std::uint64_t>(v)); }

std::int64_t parse_int(std::string_view s, int line, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

double Coefficient::value() const { return std::ldexp(static_cast<double>(grid_num), -grid_shift); }

std::optional<int> Coefficient::power_of_two() const {
  if (grid_num == 0) return std::nullopt;
  const std::int64_t mag = grid_num < 0 ? -grid_num : grid_num;
  if (!is_power_of_two(mag)) return std::nullopt;
  return std::countr_zero(static_cast<std::uint64_t>(mag)) - grid_shift;
}

std::string Coefficient::text() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Coefficient make_coefficient(std::int64_t num, std::int64_t den, int frac_bits) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "coefficient with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  Coefficient c;
  c.num = num;
  c.den = den;
  if (num == 0) {
    c.den = 1;
    return c;
  }
  if (is_power_of_two(den)) {
    c.grid_num = num;
    c.grid_shift = std::countr_zero(static_cast<std::uint64_t>(den));
    return c;
  }
  // Nearest multiple of 2^-N, ties away from zero.
  const __int128 scaled = static_cast<__int128>(num < 0 ? -num : num) << frac_bits;
  __int128 q = (2 * scaled + den) / (2 * static_cast<__int128>(den));
  std::int64_t grid = static_cast<std::int64_t>(q);
  if (num < 0) grid = -grid;
  int shift = frac_bits;
  while (grid != 0 && shift > 0 && grid % 2 == 0) {
    grid /= 2;
    --shift;
  }
  c.grid_num = grid;
  c.grid_shift = grid == 0 ? 0 : shift;
  c.rounded = true;
  return c;
}

Coefficient parse_coefficient(std::string_view text, int frac_bits) {
  if (text.empty()) throw ParseError(0, "empty coefficient");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto p = parse_int(text.substr(0, slash), 0, "coefficient numerator");
    const auto q = parse_int(text.substr(slash + 1), 0, "coefficient denominator");
    if (q == 0) throw ParseError(0, "coefficient with zero denominator");
    return make_coefficient(p, q, frac_bits);
  }
  bool negative = false;
  std::string_view body = text;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto dot = body.find('.');
  std::string digits(body.substr(0, dot));
  std::int64_t den = 1;
  if (dot != std::string_view::npos) {
    const auto frac = body.substr(dot + 1);
    if (frac.size() > 17) throw ParseError(0, "coefficient '" + std::string(text) + "' has too many digits");
    digits += frac;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  }
  if (digits.empty() || digits.size() > 18 ||
      !std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    throw ParseError(0, "bad coefficient '" + std::string(text) + "'");
  }
  const auto num = parse_int(digits, 0, "coefficient");
  return make_coefficient(negative ? -num : num, den, frac_bits);
}

Netlist::Netlist(int frac_bits) : frac_bits_(frac_bits) {
  if (frac_bits < 1 || frac_bits > 30) {
    throw Error(ErrorCode::InvalidArgument, "frac bits must be in [1, 30], got " + std::to_string(frac_bits));
  }
}

void Netlist::add_node(Node node) {
  if (node.id.empty()) throw Error(ErrorCode::InvalidArgument, "node with empty id");
  if (index_.contains(node.id)) throw Error(ErrorCode::InvalidArgument, "duplicate id '" + node.id + "'");
  index_.emplace(node.id, nodes_.size());
  nodes_.push_back(std::move(node));
}

const Node& Netlist::node(std::string_view id) const { return nodes_[index_of(id)]; }

bool Netlist::contains(std::string_view id) const { return find(id).has_value(); }

std::optional<std::size_t> Netlist::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Netlist::index_of(std::string_view id) const {
  auto found = find(id);
  if (!found) throw Error(ErrorCode::InvalidArgument, "unknown node '" + std::string(id) + "'");
  return *found;
}

std::vector<std::size_t> Netlist::sources(std::size_t index) const {
  std::vector<std::size_t> out;
  for (const auto& src : nodes_.at(index).inputs) out.push_back(index_of(src));
  return out;
}

std::vector<std::size_t> Netlist::output_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == NodeKind::Output) out.push_back(i);
  return out;
}

std::vector<std::string> Netlist::outputs() const {
  std::vector<std::string> out;
  for (auto i : output_indices()) out.push_back(nodes_[i].id);
  return out;
}

std::vector<std::size_t> Netlist::adder_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].is_adder()) out.push_back(i);
  return out;
}

std::vector<std::string> Netlist::adders() const {
  std::vector<std::string> out;
  for (auto i : adder_indices()) out.push_back(nodes_[i].id);
  return out;
}

std::vector<std::size_t> Netlist::input_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == NodeKind::Input) out.push_back(i);
  return out;
}

bool Netlist::has_delays() const {
  return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == NodeKind::Delay; });
}

// ---------------------------------------------------------------------------
// Text format

Netlist parse_netlist(std::istream& in) {
  std::optional<Netlist> net;
  struct Pending {
    std::string src;
    int line;
  };
  std::vector<Pending> forward_refs;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    const std::string& kw = tok[0];
    if (kw == "format") {
      if (net) throw ParseError(line_no, "duplicate format statement");
      if (tok.size() != 2 || tok[1].rfind("frac=", 0) != 0) throw ParseError(line_no, "expected 'format frac=<N>'");
      const auto n = parse_int(std::string_view(tok[1]).substr(5), line_no, "frac bits");
      if (n < 1 || n > 30) throw ParseError(line_no, "frac bits must be in [1, 30]");
      net.emplace(static_cast<int>(n));
      continue;
    }
    if (!net) throw ParseError(line_no, "missing 'format frac=<N>' before first node");

    Node node;
    std::size_t arity = 0;
    if (kw == "input") {
      node.kind = NodeKind::Input;
    } else if (kw == "add") {
      node.kind = NodeKind::Add;
    } else if (kw == "sub") {
      node.kind = NodeKind::Sub;
    } else if (kw == "mul") {
      node.kind = NodeKind::MulConst;
    } else if (kw == "delay") {
      node.kind = NodeKind::Delay;
    } else if (kw == "output") {
      node.kind = NodeKind::Output;
    } else {
      throw ParseError(line_no, "unknown statement '" + kw + "'");
    }
    arity = expected_arity(node.kind);
    const std::size_t want = 2 + arity + (node.kind == NodeKind::MulConst ? 1 : 0);
    if (tok.size() != want) {
      throw ParseError(line_no, "'" + kw + "' expects " + std::to_string(want - 1) + " operands, got " +
                                    std::to_string(tok.size() - 1));
    }
    node.id = tok[1];
    if (net->contains(node.id)) throw ParseError(line_no, "duplicate id '" + node.id + "'");
    for (std::size_t i = 0; i < arity; ++i) {
      const std::string& src = tok[2 + i];
      if (src == node.id && node.kind != NodeKind::Delay) {
        throw ParseError(line_no, "cycle without delay: '" + node.id + "' reads itself");
      }
      if (!net->contains(src)) {
        if (node.kind != NodeKind::Delay) throw ParseError(line_no, "undeclared source '" + src + "'");
        if (src != node.id) forward_refs.push_back({src, line_no});
      }
      node.inputs.push_back(src);
    }
    if (node.kind == NodeKind::MulConst) {
      try {
        node.coefficient = parse_coefficient(tok[3], net->frac_bits());
      } catch (const ParseError& e) {
        throw ParseError(line_no, e.what());
      }
    }
    net->add_node(std::move(node));
  }
  if (!net) throw ParseError(0, "missing 'format frac=<N>' statement");
  for (const auto& ref : forward_refs) {
    if (!net->contains(ref.src)) throw ParseError(ref.line, "undeclared source '" + ref.src + "'");
  }
  return std::move(*net);
}

Netlist parse_netlist(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_netlist(in);
}

Netlist read_netlist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open netlist '" + path + "'");
  try {
    return parse_netlist(in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

std::string render_netlist(const Netlist& netlist) {
  std::ostringstream out;
  out << "format frac=" << netlist.frac_bits() << '\n';
  for (const auto& n : netlist.nodes()) {
    out << to_string(n.kind) << ' ' << n.id;
    for (const auto& src : n.inputs) out << ' ' << src;
    if (n.coefficient) out << ' ' << n.coefficient->text();
    out << '\n';
  }
  return out.str();
}

void write_netlist_file(const Netlist& netlist, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << render_netlist(netlist);
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Graph queries

namespace {

// Edges that constrain evaluation order: every source edge except those
// leaving a delay. Returns nullopt when some source is unresolved.
std::optional<std::vector<std::vector<std::size_t>>> ordering_sources(const Netlist& net) {
  std::vector<std::vector<std::size_t>> deps(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (const auto& src : net.node(i).inputs) {
      auto s = net.find(src);
      if (!s) return std::nullopt;
      if (net.node(*s).kind != NodeKind::Delay) deps[i].push_back(*s);
    }
  }
  return deps;
}

// Level-synchronous Kahn; returns the partial order when a cycle blocks it.
std::vector<std::size_t> kahn(const Netlist& net, const std::vector<std::vector<std::size_t>>& deps) {
  std::vector<std::vector<std::size_t>> users(net.size());
  std::vector<std::size_t> pending(net.size(), 0);
  for (std::size_t i = 0; i < net.size(); ++i) {
    pending[i] = deps[i].size();
    for (auto s : deps[i]) users[s].push_back(i);
  }
  auto by_id = [&](std::size_t a, std::size_t b) { return net.node(a).id < net.node(b).id; };
  std::vector<std::size_t> level;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (pending[i] == 0) level.push_back(i);
  std::vector<std::size_t> order;
  while (!level.empty()) {
    std::sort(level.begin(), level.end(), by_id);
    std::vector<std::size_t> next;
    for (auto n : level) {
      order.push_back(n);
      for (auto u : users[n])
        if (--pending[u] == 0) next.push_back(u);
    }
    level = std::move(next);
  }
  return order;
}

}  // namespace

std::vector<Diagnostic> validate(const Netlist& net) {
  std::vector<Diagnostic> diags;
  bool resolved = true;
  for (const auto& n : net.nodes()) {
    if (n.inputs.size() != expected_arity(n.kind)) {
      diags.push_back({n.id, std::string(to_string(n.kind)) + " expects " + std::to_string(expected_arity(n.kind)) +
                                 " source(s), has " + std::to_string(n.inputs.size())});
    }
    for (const auto& src : n.inputs) {
      auto s = net.find(src);
      if (!s) {
        diags.push_back({n.id, "undeclared source '" + src + "'"});
        resolved = false;
      } else if (net.node(*s).kind == NodeKind::Output) {
        diags.push_back({n.id, "reads output node '" + src + "'"});
      }
    }
    if (n.kind == NodeKind::MulConst && !n.coefficient) diags.push_back({n.id, "mul without coefficient"});
    if (n.kind != NodeKind::MulConst && n.coefficient) diags.push_back({n.id, "coefficient on non-mul node"});
    if (n.coefficient) {
      const auto& c = *n.coefficient;
      if (!c.rounded && !is_power_of_two(c.den) && c.num != 0) {
        diags.push_back({n.id, "coefficient denominator is not a power of two and not rounded"});
      }
    }
  }
  const auto outs = net.output_indices();
  if (outs.empty()) diags.push_back({"", "no output"});
  if (!resolved) return diags;

  const auto deps = *ordering_sources(net);
  const auto order = kahn(net, deps);
  if (order.size() != net.size()) {
    std::vector<bool> placed(net.size(), false);
    for (auto i : order) placed[i] = true;
    for (std::size_t i = 0; i < net.size(); ++i)
      if (!placed[i]) diags.push_back({net.node(i).id, "on a cycle without delay"});
  }
  for (auto o : outs) {
    // Reverse reachability through all edges, delays included.
    std::vector<bool> seen(net.size(), false);
    std::vector<std::size_t> stack{o};
    bool reaches_input = false;
    while (!stack.empty()) {
      auto n = stack.back();
      stack.pop_back();
      if (seen[n]) continue;
      seen[n] = true;
      if (net.node(n).kind == NodeKind::Input) reaches_input = true;
      for (auto s : net.sources(n)) stack.push_back(s);
    }
    if (!reaches_input) diags.push_back({net.node(o).id, "output not connected to any input"});
  }
  return diags;
}

void require_valid(const Netlist& netlist) {
  const auto diags = validate(netlist);
  if (diags.empty()) return;
  std::string msg = "invalid netlist:";
  for (const auto& d : diags) msg += "\n  " + (d.node.empty() ? std::string("<netlist>") : d.node) + ": " + d.message;
  throw Error(ErrorCode::InvalidArgument, msg);
}

std::vector<std::size_t> topological_order(const Netlist& net) {
  if (net.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty netlist");
  auto deps = ordering_sources(net);
  if (!deps) throw Error(ErrorCode::InvalidArgument, "netlist has undeclared sources");
  auto order = kahn(net, *deps);
  if (order.size() != net.size()) throw Error(ErrorCode::InvalidArgument, "cycle without delay");
  return order;
}

std::vector<std::size_t> fanin_cone_indices(const Netlist& net, std::size_t output_index) {
  if (net.node(output_index).kind != NodeKind::Output) {
    throw Error(ErrorCode::InvalidArgument, "'" + net.node(output_index).id + "' is not an output");
  }
  std::vector<bool> seen(net.size(), false);
  std::vector<std::size_t> stack{output_index};
  std::vector<std::size_t> cone;
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    if (net.node(n).is_adder()) cone.push_back(n);
    for (auto s : net.sources(n)) stack.push_back(s);
  }
  std::sort(cone.begin(), cone.end());
  return cone;
}

std::set<std::string> fanin_cone(const Netlist& net, std::string_view output_id) {
  auto o = net.find(output_id);
  if (!o) throw Error(ErrorCode::InvalidArgument, "unknown output '" + std::string(output_id) + "'");
  std::set<std::string> out;
  for (auto i : fanin_cone_indices(net, *o)) out.insert(net.node(i).id);
  return out;
}

std::vector<int> adder_depths(const Netlist& net) {
  std::vector<int> depth(net.size(), 0);
  for (auto i : topological_order(net)) {
    const auto& n = net.node(i);
    if (n.kind == NodeKind::Delay || n.kind == NodeKind::Input) continue;
    int d = 0;
    for (auto s : net.sources(i))
      if (net.node(s).kind != NodeKind::Delay) d = std::max(d, depth[s]);
    depth[i] = d + (n.is_adder() ? 1 : 0);
  }
  return depth;
}

// ---------------------------------------------------------------------------
// Assignment

Assignment::Assignment(const Netlist& netlist, int k) : k_(netlist.size(), 0) {
  if (k < 0 || k > netlist.frac_bits()) throw Error(ErrorCode::InvalidArgument, "k out of range");
  for (auto i : netlist.adder_indices()) k_[i] = k;
}

int Assignment::get(const Netlist& netlist, std::string_view adder_id) const {
  const auto i = netlist.index_of(adder_id);
  if (!netlist.node(i).is_adder()) throw Error(ErrorCode::InvalidArgument, "'" + std::string(adder_id) + "' is not an adder");
  return k_.at(i);
}

void Assignment::set(const Netlist& netlist, std::string_view adder_id, int k) {
  const auto i = netlist.index_of(adder_id);
  if (!netlist.node(i).is_adder()) throw Error(ErrorCode::InvalidArgument, "'" + std::string(adder_id) + "' is not an adder");
  if (k < 0 || k > netlist.frac_bits()) {
    throw Error(ErrorCode::InvalidArgument, "k=" + std::to_string(k) + " for '" + std::string(adder_id) +
                                                "' outside [0, " + std::to_string(netlist.frac_bits()) + "]");
  }
  k_.at(i) = k;
}

int Assignment::total() const { return std::accumulate(k_.begin(), k_.end(), 0); }

Assignment read_assignment(const Netlist& netlist, std::istream& in) {
  Assignment a(netlist);
  std::vector<bool> given(netlist.size(), false);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(line_no, "expected '<adder-id> <k>'");
    auto idx = netlist.find(tok[0]);
    if (!idx || !netlist.node(*idx).is_adder()) throw ParseError(line_no, "'" + tok[0] + "' is not an adder of the netlist");
    if (given[*idx]) throw ParseError(line_no, "duplicate entry for '" + tok[0] + "'");
    const auto k = parse_int(tok[1], line_no, "k");
    if (k < 0 || k > netlist.frac_bits()) throw ParseError(line_no, "k out of range [0, " + std::to_string(netlist.frac_bits()) + "]");
    a.set(*idx, static_cast<int>(k));
    given[*idx] = true;
  }
  for (auto i : netlist.adder_indices())
    if (!given[i]) throw ParseError(0, "assignment has no entry for adder '" + netlist.node(i).id + "'");
  return a;
}

Assignment read_assignment_file(const Netlist& netlist, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open assignment '" + path + "'");
  try {
    return read_assignment(netlist, in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

std::string render_assignment(const Netlist& netlist, const Assignment& assignment) {
  std::string out;
  for (auto i : netlist.adder_indices()) out += netlist.node(i).id + " " + std::to_string(assignment[i]) + "\n";
  return out;
}

void write_assignment_file(const Netlist& netlist, const Assignment& assignment, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << render_assignment(netlist, assignment);
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::uint64_t assignment_hash(const Netlist& netlist, const Assignment& assignment) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : render_assignment(netlist, assignment)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace apx
