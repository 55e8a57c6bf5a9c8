#pragma once

// Symbolic Tauer-masa approximants A_n(t). A minimal projection of A_n(t)
// is an elementary tensor of rank-one projections, one per tensor leg, so it
// is stored as a list of (masa index, vector index) pairs. All construction
// logic is integer arithmetic; matrices appear only in materialize().

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tauer/matrix.hpp"
#include "tauer/ortho_masas.hpp"
#include "tauer/tower.hpp"

namespace tauer {

struct LegEntry {
  std::uint32_t masa = 0;
  std::uint32_t vec = 0;

  friend auto operator<=>(const LegEntry&, const LegEntry&) = default;
};

/// Leg factors for legs first_leg, first_leg + 1, ... A full label of level n
/// has first_leg = 1 and n entries; block-masa labels start past the base.
struct ProjLabel {
  int first_leg = 1;
  std::vector<LegEntry> legs;

  int last_leg() const { return first_leg + static_cast<int>(legs.size()) - 1; }

  friend bool operator==(const ProjLabel&, const ProjLabel&) = default;
};

/// One orthogonal family per tensor leg: leg r carries K_{r-1} + 1 masas of
/// M_{k_r}.
class LegFamilies {
 public:
  explicit LegFamilies(const PrimeTower& tower);

  int depth() const { return static_cast<int>(families_.size()); }
  const OrthoFamily& leg(int r) const;

 private:
  std::vector<OrthoFamily> families_;
};

class Approximant {
 public:
  Approximant(TowerRational t, int level, std::vector<LegEntry> entries);

  const TowerRational& parameter() const { return t_; }
  int level() const { return level_; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(entries_.size()) / level_;
  }

  std::span<const LegEntry> legs(std::int64_t m) const;
  ProjLabel label(std::int64_t m) const;
  std::vector<ProjLabel> labels() const;

 private:
  TowerRational t_;
  int level_;
  std::vector<LegEntry> entries_;
};

/// A^{(e)}_{n2,n1}: the partial labels over legs n1+1..n2 of every level-n2
/// label extending the base label e = f_m at level n1.
struct BlockMasa {
  ProjLabel base;
  std::int64_t base_index = 0;
  int base_level = 0;
  int target_level = 0;
  std::vector<ProjLabel> labels;
};

class TauerConstruction {
 public:
  /// Label construction needs K_{n-1} and k_n to fit in 32 bits, which holds
  /// for towers of depth <= 6.
  explicit TauerConstruction(PrimeTower tower);

  const PrimeTower& tower() const { return tower_; }
  const LegFamilies& families() const { return families_; }

  TowerRational rational(std::int64_t numerator, int level) const {
    return TowerRational(tower_, BigInt(numerator), level);
  }
  TowerRational parse(const std::string& text) const {
    return parse_tower_rational(tower_, text);
  }

  /// A_n(t) with the enumeration f_0 ... f_{K_n - 1}. Memoized; safe for
  /// concurrent callers. Throws std::domain_error for n < n0(t).
  std::shared_ptr<const Approximant> approximant(const TowerRational& t, int n) const;

  /// The same labels recomputed one at a time by direct recursion, with no
  /// cache. Used to cross-check approximant().
  ProjLabel label_at(const TowerRational& t, int n, std::int64_t m) const;

  BlockMasa block_masa(const TowerRational& t, std::int64_t m, int n1, int n2) const;

  /// f_m(t) for m < t K_n; their sum has trace exactly t.
  std::vector<ProjLabel> gamma_projection(const TowerRational& t, int n) const;

  /// Labels of A_n(s) with m < s K_n or m >= t K_n (requires s < t).
  std::vector<ProjLabel> common_cutdown(const TowerRational& s, const TowerRational& t,
                                        int n) const;

  /// t K_n as a label index (n >= n0(t)).
  std::int64_t cut(const TowerRational& t, int n) const { return scaled_index(t, tower_, n); }

  /// Largest label count for which a full approximant will be built.
  static constexpr std::int64_t kMaxLabels = std::int64_t{1} << 23;

 private:
  std::shared_ptr<const Approximant> build(const TowerRational& t, int n) const;
  void check_level(const TowerRational& t, int n) const;

  PrimeTower tower_;
  LegFamilies families_;

  using CacheKey = std::tuple<std::string, int>;
  mutable std::shared_mutex cache_mutex_;
  mutable std::map<CacheKey, std::shared_ptr<const Approximant>> cache_;
};

/// prod_r |<v_r, w_r>|^2: the unnormalized overlap of two rank-one labels.
/// Divide by the block dimension for the normalized trace tr(ab).
/// Throws std::invalid_argument on a leg-range mismatch.
double trace_pairing(const ProjLabel& a, const ProjLabel& b, const LegFamilies& families);

/// max |trace_pairing(a, b) - [a = b]| over all pairs of the list. Zero
/// exactly when the labels are pairwise orthogonal; K_n such labels of level n
/// are then the minimal projections of a masa of N_n.
double orthonormality_defect(std::span<const ProjLabel> labels, const LegFamilies& families);

/// Tensor product of the leg vectors of a label.
ComplexVector label_vector(const ProjLabel& label, const LegFamilies& families);

/// Columns are the label vectors, in order.
ComplexMatrix label_basis(std::span<const ProjLabel> labels, const LegFamilies& families);

/// Product of k_r over the label's legs.
std::int64_t label_space_dim(const ProjLabel& label, const LegFamilies& families);

/// Sum of the labels' projections as a dense matrix. Refuses dimensions
/// above kDenseDimLimit ("dense materialization refused at this level").
ComplexMatrix materialize(std::span<const ProjLabel> labels, const LegFamilies& families);

/// "m: (m_1,l_1)(m_2,l_2)..." one label per line.
std::string dump_labels(const Approximant& approximant);
std::string format_label(const ProjLabel& label);

}  // namespace tauer
