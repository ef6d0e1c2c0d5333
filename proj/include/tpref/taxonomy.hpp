#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tpref {

using ValueId = uint32_t;

// A finite poset of values given by is-a edges (child, parent) plus the
// derived reflexive-transitive reachability. Immutable after construction;
// safe to share across threads.
class Taxonomy {
 public:
  // Reads the CSV format: one `child,parent` record per line, `value,` (or a
  // bare `value`) declares an isolated root, `#` starts a comment line.
  static Taxonomy load(std::istream& in, const std::string& name);
  static Taxonomy load_file(const std::string& path);

  // Forest of `fanout` rooted trees with `depth` levels, every internal node
  // having exactly `fanout` children. The seed only permutes value names.
  static Taxonomy regular(uint32_t fanout, uint32_t depth, uint64_t seed);

  // Like regular() but each internal node's child count is Poisson(avg_fanout);
  // a draw of zero makes the node a leaf.
  static Taxonomy random_poisson(double avg_fanout, uint32_t depth,
                                 uint64_t seed);

  // Forest of trees whose fanouts follow a discrete power law with the given
  // exponent; grows level by level until at least target_nodes values exist.
  static Taxonomy scale_free(uint64_t target_nodes, double exponent,
                             uint64_t seed);

  const std::string& name() const { return name_; }
  size_t size() const { return names_.size(); }

  const std::string& value_name(ValueId v) const { return names_[v]; }
  std::optional<ValueId> find_value(const std::string& name) const;
  // Throws UnknownValue.
  ValueId value_id(const std::string& name) const;

  // v1 = v2 or v2 reachable from v1 via parent edges.
  bool leq(ValueId v1, ValueId v2) const;

  // Some w with leq(w, v1) and leq(w, v2), if one exists. Fast paths: the
  // comparable case, then (for non-functional taxonomies) a scan of the
  // cached multi-parent values, then exact down-set intersection.
  std::optional<ValueId> common_descendant(ValueId v1, ValueId v2) const;

  // Min edge-distance from v to a leaf below it; 0 for leaves.
  uint32_t height(ValueId v) const { return heights_[v]; }

  const std::vector<ValueId>& roots() const { return roots_; }
  const std::vector<ValueId>& multiparent() const { return multiparent_; }
  bool functional() const { return multiparent_.empty(); }

  const std::vector<ValueId>& parents(ValueId v) const { return parents_[v]; }
  const std::vector<ValueId>& children(ValueId v) const {
    return children_[v];
  }

  // All w with leq(w, v), v included, in ascending id order.
  std::vector<ValueId> down_set(ValueId v) const;

  // Longest root-to-leaf path length in edges.
  uint32_t max_depth() const;

  // Writes the CSV representation (edges plus isolated roots).
  void save(std::ostream& out) const;

 private:
  Taxonomy() = default;
  ValueId intern(const std::string& name);
  void add_edge(ValueId child, ValueId parent);
  // Toposorts, throws on cycles, builds ancestor sets and heights.
  void finalize();

  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, ValueId> ids_;
  std::vector<std::vector<ValueId>> parents_;
  std::vector<std::vector<ValueId>> children_;
  std::vector<std::vector<ValueId>> up_;  // sorted ancestors, self included
  std::vector<uint32_t> heights_;
  std::vector<ValueId> roots_;
  std::vector<ValueId> multiparent_;
};

}  // namespace tpref
