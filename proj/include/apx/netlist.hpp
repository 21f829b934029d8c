#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace apx {

enum class NodeKind { Input, Add, Sub, MulConst, Delay, Output };

std::string_view to_string(NodeKind kind);

/// Constant multiplier coefficient. `num/den` is the reduced value as written;
/// `grid_num / 2^grid_shift` is the value actually applied on the 2^-N grid.
/// `rounded` is set when the written denominator is not a power of two and
/// the value had to be snapped to the nearest multiple of 2^-N.
struct Coefficient {
  std::int64_t num = 0;
  std::int64_t den = 1;
  std::int64_t grid_num = 0;
  int grid_shift = 0;
  bool rounded = false;

  double value() const;
  /// Exponent l when the applied value is +-2^l, nullopt otherwise (and for 0).
  std::optional<int> power_of_two() const;
  bool negative() const { return grid_num < 0; }
  std::string text() const;

  bool operator==(const Coefficient&) const = default;
};

Coefficient make_coefficient(std::int64_t num, std::int64_t den, int frac_bits);
/// Accepts `p/q`, integers and decimals with an optional sign.
Coefficient parse_coefficient(std::string_view text, int frac_bits);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Input;
  std::vector<std::string> inputs;
  std::optional<Coefficient> coefficient;

  bool is_adder() const { return kind == NodeKind::Add || kind == NodeKind::Sub; }
  bool operator==(const Node&) const = default;
};

/// Signal-flow graph over a single fixed-point format with `frac_bits`
/// fractional bits. Nodes keep declaration order; lookups are by id or index.
/// Immutable once built, so concurrent readers need no locking.
class Netlist {
 public:
  explicit Netlist(int frac_bits);

  int frac_bits() const { return frac_bits_; }

  /// Appends a node. Sources are not resolved here; see validate().
  void add_node(Node node);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t index) const { return nodes_.at(index); }
  const Node& node(std::string_view id) const;
  bool contains(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;
  std::optional<std::size_t> find(std::string_view id) const;

  /// Resolved source indices; throws if a source is undeclared.
  std::vector<std::size_t> sources(std::size_t index) const;

  std::vector<std::size_t> output_indices() const;
  std::vector<std::string> outputs() const;
  std::vector<std::size_t> adder_indices() const;
  std::vector<std::string> adders() const;
  std::vector<std::size_t> input_indices() const;

  bool has_delays() const;

  bool operator==(const Netlist& other) const {
    return frac_bits_ == other.frac_bits_ && nodes_ == other.nodes_;
  }

 private:
  int frac_bits_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
};

Netlist parse_netlist(std::istream& in);
Netlist parse_netlist(std::string_view text);
Netlist read_netlist_file(const std::string& path);
/// Canonical text form; parse_netlist(render_netlist(n)) == n.
std::string render_netlist(const Netlist& netlist);
void write_netlist_file(const Netlist& netlist, const std::string& path);

struct Diagnostic {
  std::string node;
  std::string message;
};

std::vector<Diagnostic> validate(const Netlist& netlist);
/// Throws apx::Error with all diagnostics when validate() is non-empty.
void require_valid(const Netlist& netlist);

/// Evaluation order. Delay nodes are registers: their output is the state
/// from the previous step, so edges leaving a delay impose no ordering and a
/// delay is placed after its own source. Ties are broken level by level in
/// id order.
std::vector<std::size_t> topological_order(const Netlist& netlist);

std::set<std::string> fanin_cone(const Netlist& netlist, std::string_view output_id);
std::vector<std::size_t> fanin_cone_indices(const Netlist& netlist, std::size_t output_index);

/// Adder depth of every node: 1 + max depth of sources for adders, max depth of
/// sources otherwise, 0 for inputs. Delay edges are not followed (depth of a
/// delay is 0) so the result is finite for feedback graphs.
std::vector<int> adder_depths(const Netlist& netlist);

/// Number of approximate fractional bits per Add/Sub node, indexed by node
/// index (entries of other nodes are always 0).
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(const Netlist& netlist, int k = 0);

  int operator[](std::size_t node) const { return k_.at(node); }
  void set(std::size_t node, int k) { k_.at(node) = k; }
  int get(const Netlist& netlist, std::string_view adder_id) const;
  void set(const Netlist& netlist, std::string_view adder_id, int k);

  std::size_t size() const { return k_.size(); }
  const std::vector<int>& values() const { return k_; }
  int total() const;
  bool all_zero() const { return total() == 0; }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<int> k_;
};

Assignment read_assignment(const Netlist& netlist, std::istream& in);
Assignment read_assignment_file(const Netlist& netlist, const std::string& path);
std::string render_assignment(const Netlist& netlist, const Assignment& assignment);
void write_assignment_file(const Netlist& netlist, const Assignment& assignment,
                           const std::string& path);
/// FNV-1a over the canonical text, for report headers.
std::uint64_t assignment_hash(const Netlist& netlist, const Assignment& assignment);

}  // namespace apx
