#include "tpref/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "tpref/errors.hpp"

namespace tpref {

namespace {

constexpr char kForbidden[] = ",&|>!;";

bool valid_value_token(const std::string& s) {
  if (s.empty()) return false;
  if (std::isspace(static_cast<unsigned char>(s.front())) ||
      std::isspace(static_cast<unsigned char>(s.back())))
    return false;
  return s.find_first_of(kForbidden) == std::string::npos;
}

}  // namespace

ValueId Taxonomy::intern(const std::string& name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  ValueId id = static_cast<ValueId>(names_.size());
  ids_.emplace(name, id);
  names_.push_back(name);
  parents_.emplace_back();
  children_.emplace_back();
  return id;
}

void Taxonomy::add_edge(ValueId child, ValueId parent) {
  auto& ps = parents_[child];
  if (std::find(ps.begin(), ps.end(), parent) != ps.end()) return;
  ps.push_back(parent);
  children_[parent].push_back(child);
}

void Taxonomy::finalize() {
  if (names_.empty()) fail(ErrorKind::kEmptyTaxonomy, name_ + ": no values");
  const size_t n = names_.size();

  // Kahn from the roots downward; parents precede children in `order`.
  std::vector<uint32_t> pending(n);
  std::deque<ValueId> queue;
  for (ValueId v = 0; v < n; ++v) {
    pending[v] = static_cast<uint32_t>(parents_[v].size());
    if (pending[v] == 0) {
      queue.push_back(v);
      roots_.push_back(v);
    } else if (pending[v] > 1) {
      multiparent_.push_back(v);
    }
  }
  std::vector<ValueId> order;
  order.reserve(n);
  while (!queue.empty()) {
    ValueId v = queue.front();
    queue.pop_front();
    order.push_back(v);
    for (ValueId c : children_[v])
      if (--pending[c] == 0) queue.push_back(c);
  }
  if (order.size() != n)
    fail(ErrorKind::kCycleDetected, name_ + ": edge set induces a cycle");

  up_.assign(n, {});
  for (ValueId v : order) {
    std::set<ValueId> anc;
    anc.insert(v);
    for (ValueId p : parents_[v]) anc.insert(up_[p].begin(), up_[p].end());
    up_[v].assign(anc.begin(), anc.end());
  }

  heights_.assign(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    ValueId v = *it;
    if (children_[v].empty()) continue;
    uint32_t h = UINT32_MAX;
    for (ValueId c : children_[v]) h = std::min(h, heights_[c]);
    heights_[v] = h + 1;
  }
}

Taxonomy Taxonomy::load(std::istream& in, const std::string& name) {
  Taxonomy t;
  t.name_ = name;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto where = [&] {
      return name + ":" + std::to_string(lineno) + ": '" + line + "'";
    };
    size_t comma = line.find(',');
    std::string child = line.substr(0, comma);
    std::string parent;
    if (comma != std::string::npos) {
      parent = line.substr(comma + 1);
      if (parent.find(',') != std::string::npos)
        fail(ErrorKind::kMalformedLine, "more than two fields at " + where());
    }
    if (!valid_value_token(child))
      fail(ErrorKind::kMalformedLine, "bad value at " + where());
    if (!parent.empty() && !valid_value_token(parent))
      fail(ErrorKind::kMalformedLine, "bad value at " + where());
    ValueId c = t.intern(child);
    if (!parent.empty()) t.add_edge(c, t.intern(parent));
  }
  t.finalize();
  return t;
}

Taxonomy Taxonomy::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIoError, "cannot open taxonomy file " + path);
  std::string name = path;
  size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  return load(in, name);
}

std::optional<ValueId> Taxonomy::find_value(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

ValueId Taxonomy::value_id(const std::string& name) const {
  auto v = find_value(name);
  if (!v) fail(ErrorKind::kUnknownValue, "unknown value '" + name + "' in " + name_);
  return *v;
}

bool Taxonomy::leq(ValueId v1, ValueId v2) const {
  const auto& up = up_[v1];
  return std::binary_search(up.begin(), up.end(), v2);
}

std::optional<ValueId> Taxonomy::common_descendant(ValueId v1,
                                                   ValueId v2) const {
  if (leq(v1, v2)) return v1;
  if (leq(v2, v1)) return v2;
  if (functional()) return std::nullopt;
  // In a DAG, two incomparable values with a common descendant always have a
  // multi-parent value below both, so this scan is conclusive when the cache
  // is small enough to run.
  constexpr size_t kScanCap = 1 << 16;
  if (multiparent_.size() <= kScanCap) {
    for (ValueId m : multiparent_)
      if (leq(m, v1) && leq(m, v2)) return m;
    return std::nullopt;
  }
  // Exact down-set intersection.
  std::vector<char> below1(names_.size(), 0);
  for (ValueId w : down_set(v1)) below1[w] = 1;
  std::deque<ValueId> queue{v2};
  std::vector<char> seen(names_.size(), 0);
  seen[v2] = 1;
  while (!queue.empty()) {
    ValueId v = queue.front();
    queue.pop_front();
    if (below1[v]) return v;
    for (ValueId c : children_[v])
      if (!seen[c]) {
        seen[c] = 1;
        queue.push_back(c);
      }
  }
  return std::nullopt;
}

std::vector<ValueId> Taxonomy::down_set(ValueId v) const {
  std::vector<char> seen(names_.size(), 0);
  std::deque<ValueId> queue{v};
  seen[v] = 1;
  std::vector<ValueId> out;
  while (!queue.empty()) {
    ValueId u = queue.front();
    queue.pop_front();
    out.push_back(u);
    for (ValueId c : children_[u])
      if (!seen[c]) {
        seen[c] = 1;
        queue.push_back(c);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

uint32_t Taxonomy::max_depth() const {
  // Longest path; up-sets grow along edges so |up(v)|-1 bounds from below,
  // but multi-parent DAGs need the real recurrence.
  std::vector<uint32_t> depth(names_.size(), 0);
  std::deque<ValueId> queue;
  std::vector<uint32_t> pending(names_.size());
  for (ValueId v = 0; v < names_.size(); ++v) {
    pending[v] = static_cast<uint32_t>(parents_[v].size());
    if (pending[v] == 0) queue.push_back(v);
  }
  uint32_t best = 0;
  while (!queue.empty()) {
    ValueId v = queue.front();
    queue.pop_front();
    best = std::max(best, depth[v]);
    for (ValueId c : children_[v]) {
      depth[c] = std::max(depth[c], depth[v] + 1);
      if (--pending[c] == 0) queue.push_back(c);
    }
  }
  return best;
}

void Taxonomy::save(std::ostream& out) const {
  for (ValueId v = 0; v < names_.size(); ++v) {
    if (parents_[v].empty()) {
      out << names_[v] << ",\n";
    } else {
      for (ValueId p : parents_[v]) out << names_[v] << ',' << names_[p] << '\n';
    }
  }
}

Taxonomy Taxonomy::regular(uint32_t fanout, uint32_t depth, uint64_t seed) {
  uint64_t total = 0;
  uint64_t level = 1;
  for (uint32_t i = 1; i <= depth; ++i) {
    level *= fanout;
    total += level;
  }
  std::vector<uint64_t> perm(total);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  Taxonomy t;
  t.name_ = "regular_f" + std::to_string(fanout) + "_d" + std::to_string(depth);
  auto value_name = [&](uint64_t i) { return "v" + std::to_string(perm[i]); };
  uint64_t next = 0;
  std::vector<ValueId> frontier;
  for (uint32_t i = 0; i < fanout; ++i)
    frontier.push_back(t.intern(value_name(next++)));
  for (uint32_t lvl = 1; lvl < depth; ++lvl) {
    std::vector<ValueId> nxt;
    nxt.reserve(frontier.size() * fanout);
    for (ValueId p : frontier) {
      for (uint32_t i = 0; i < fanout; ++i) {
        ValueId c = t.intern(value_name(next++));
        t.add_edge(c, p);
        nxt.push_back(c);
      }
    }
    frontier = std::move(nxt);
  }
  t.finalize();
  return t;
}

Taxonomy Taxonomy::random_poisson(double avg_fanout, uint32_t depth,
                                  uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::poisson_distribution<uint32_t> pois(avg_fanout);

  Taxonomy t;
  t.name_ = "random_f" + std::to_string(avg_fanout);
  uint64_t next = 0;
  auto fresh = [&] { return t.intern("v" + std::to_string(next++)); };
  uint32_t nroots = std::max<uint32_t>(1, pois(rng));
  std::vector<ValueId> frontier;
  for (uint32_t i = 0; i < nroots; ++i) frontier.push_back(fresh());
  for (uint32_t lvl = 1; lvl < depth; ++lvl) {
    std::vector<ValueId> nxt;
    for (ValueId p : frontier) {
      uint32_t k = pois(rng);
      for (uint32_t i = 0; i < k; ++i) {
        ValueId c = fresh();
        t.add_edge(c, p);
        nxt.push_back(c);
      }
    }
    if (nxt.empty()) break;
    frontier = std::move(nxt);
  }
  t.finalize();
  return t;
}

Taxonomy Taxonomy::scale_free(uint64_t target_nodes, double exponent,
                              uint64_t seed) {
  if (exponent <= 1.0)
    fail(ErrorKind::kInvalidArgument, "scale-free exponent must be > 1");
  std::mt19937_64 rng(seed);
  // Power-law fanout k with P(k) proportional to k^-exponent for k >= 1,
  // truncated at 1000. A fixed leaf probability keeps the branching process
  // subcritical, which is what produces the very deep instances the family
  // is used for (tens of levels at 15-20K nodes).
  constexpr uint32_t kMaxFanout = 1000;
  constexpr double kLeafProb = 0.48;
  std::vector<double> weights(kMaxFanout);
  for (uint32_t k = 1; k <= kMaxFanout; ++k)
    weights[k - 1] = std::pow(static_cast<double>(k), -exponent);
  std::discrete_distribution<uint32_t> zipf(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Taxonomy t;
  t.name_ = "scale_free";
  uint64_t next = 0;
  auto fresh = [&] { return t.intern("v" + std::to_string(next++)); };
  uint64_t total = 0;
  while (total < target_nodes) {
    std::vector<ValueId> frontier{fresh()};
    ++total;
    while (!frontier.empty() && total < target_nodes) {
      std::vector<ValueId> nxt;
      for (ValueId p : frontier) {
        if (unit(rng) < kLeafProb) continue;
        uint32_t k = zipf(rng) + 1;
        for (uint32_t i = 0; i < k; ++i) {
          ValueId c = fresh();
          t.add_edge(c, p);
          nxt.push_back(c);
        }
      }
      total = t.names_.size();
      frontier = std::move(nxt);
    }
  }
  t.finalize();
  return t;
}

}  // namespace tpref
