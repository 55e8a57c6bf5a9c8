#include "tauer/construction.hpp"

#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace tauer {

namespace {

std::uint32_t to_u32(std::int64_t v) {
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) {
    throw std::overflow_error("index exceeds 32-bit label range");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

LegFamilies::LegFamilies(const PrimeTower& tower) {
  families_.reserve(static_cast<std::size_t>(tower.depth()));
  for (int r = 1; r <= tower.depth(); ++r) {
    const std::uint32_t p = to_u32(tower.prime_i64(r));
    const std::uint32_t count = to_u32(tower.product_i64(r - 1) + 1);
    families_.emplace_back(p, count, r);
  }
}

const OrthoFamily& LegFamilies::leg(int r) const {
  if (r < 1 || r > depth()) throw std::out_of_range("leg index out of range");
  return families_[static_cast<std::size_t>(r - 1)];
}

Approximant::Approximant(TowerRational t, int level, std::vector<LegEntry> entries)
    : t_(std::move(t)), level_(level), entries_(std::move(entries)) {
  if (level_ < 1 || entries_.size() % static_cast<std::size_t>(level_) != 0) {
    throw std::invalid_argument("malformed approximant");
  }
}

std::span<const LegEntry> Approximant::legs(std::int64_t m) const {
  if (m < 0 || m >= size()) throw std::out_of_range("label index out of range");
  return std::span<const LegEntry>(entries_).subspan(
      static_cast<std::size_t>(m * level_), static_cast<std::size_t>(level_));
}

ProjLabel Approximant::label(std::int64_t m) const {
  const auto l = legs(m);
  return ProjLabel{1, std::vector<LegEntry>(l.begin(), l.end())};
}

std::vector<ProjLabel> Approximant::labels() const {
  std::vector<ProjLabel> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::int64_t m = 0; m < size(); ++m) out.push_back(label(m));
  return out;
}

TauerConstruction::TauerConstruction(PrimeTower tower)
    : tower_(std::move(tower)), families_(tower_) {}

void TauerConstruction::check_level(const TowerRational& t, int n) const {
  if (n > tower_.depth()) throw std::out_of_range("level exceeds tower depth");
  if (n < t.canonical_level()) throw std::domain_error("parameter not defined at this level");
}

std::shared_ptr<const Approximant> TauerConstruction::approximant(const TowerRational& t,
                                                                  int n) const {
  check_level(t, n);
  CacheKey key{t.to_string(), n};
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  // Built outside the lock; concurrent builders of the same key compute
  // identical values and the first insertion wins.
  auto built = build(t, n);
  std::unique_lock lock(cache_mutex_);
  auto [it, inserted] = cache_.emplace(std::move(key), std::move(built));
  return it->second;
}

std::shared_ptr<const Approximant> TauerConstruction::build(const TowerRational& t,
                                                            int n) const {
  const std::int64_t size = tower_.product_i64(n);
  if (size > kMaxLabels) throw std::length_error("label enumeration refused at this level");
  std::vector<LegEntry> entries;
  entries.reserve(static_cast<std::size_t>(size * n));

  const int n0 = t.canonical_level();
  if (n == 1) {
    // Base: the diagonal masa of M_2, shared by 0, 1/2 and 1.
    entries.push_back({0, 0});
    entries.push_back({0, 1});
  } else if (n == n0) {
    // First approximant of t in I_n \ I_{n-1}: copy from the two neighbours
    // m0 / K_{n-1} and (m0 + 1) / K_{n-1}, split at t K_n.
    const int below = n - 1;
    const BigInt m0 = floor_scaled(t, tower_, below);
    const auto lower = approximant(TowerRational(tower_, m0, below), n);
    const auto upper = approximant(TowerRational(tower_, m0 + 1, below), n);
    const std::int64_t split = cut(t, n);
    for (std::int64_t m = 0; m < size; ++m) {
      const auto src = (m < split ? upper : lower)->legs(m);
      entries.insert(entries.end(), src.begin(), src.end());
    }
  } else {
    // Extend A_{n-1}(t) by leg n. Label m' = k m + l sits over parent m.
    const int n1 = n - 1;
    const auto parent = approximant(t, n1);
    const std::int64_t k = tower_.prime_i64(n);
    const std::int64_t parents = tower_.product_i64(n1);
    const std::int64_t split = cut(t, n1);
    const bool even = n1 % 2 == 0;
    for (std::int64_t m = 0; m < parents; ++m) {
      const std::uint32_t masa = to_u32(even || m >= split ? m : parents);
      const auto prefix = parent->legs(m);
      for (std::int64_t l = 0; l < k; ++l) {
        entries.insert(entries.end(), prefix.begin(), prefix.end());
        entries.push_back({masa, to_u32(l)});
      }
    }
  }
  return std::make_shared<const Approximant>(t, n, std::move(entries));
}

ProjLabel TauerConstruction::label_at(const TowerRational& t, int n, std::int64_t m) const {
  check_level(t, n);
  const std::int64_t size = tower_.product_i64(n);
  if (m < 0 || m >= size) throw std::out_of_range("label index out of range");
  const int n0 = t.canonical_level();
  if (n == 1) return ProjLabel{1, {{0, to_u32(m)}}};
  if (n == n0) {
    const BigInt m0 = floor_scaled(t, tower_, n - 1);
    const BigInt source = m < cut(t, n) ? m0 + 1 : m0;
    return label_at(TowerRational(tower_, source, n - 1), n, m);
  }
  const std::int64_t k = tower_.prime_i64(n);
  const std::int64_t parent = m / k;
  ProjLabel label = label_at(t, n - 1, parent);
  const bool even = (n - 1) % 2 == 0;
  const std::int64_t masa =
      even || parent >= cut(t, n - 1) ? parent : tower_.product_i64(n - 1);
  label.legs.push_back({to_u32(masa), to_u32(m % k)});
  return label;
}

BlockMasa TauerConstruction::block_masa(const TowerRational& t, std::int64_t m, int n1,
                                        int n2) const {
  check_level(t, n1);
  if (n2 <= n1 || n2 > tower_.depth()) throw std::out_of_range("block target level out of range");
  const std::int64_t parents = tower_.product_i64(n1);
  if (m < 0 || m >= parents) throw std::out_of_range("label index out of range");

  const auto base = approximant(t, n1);
  const auto target = approximant(t, n2);
  const std::int64_t width = tower_.product_i64(n2) / parents;

  BlockMasa block;
  block.base = base->label(m);
  block.base_index = m;
  block.base_level = n1;
  block.target_level = n2;
  block.labels.reserve(static_cast<std::size_t>(width));
  const auto prefix = base->legs(m);
  for (std::int64_t j = m * width; j < (m + 1) * width; ++j) {
    const auto full = target->legs(j);
    if (!std::equal(prefix.begin(), prefix.end(), full.begin())) {
      throw std::logic_error("level-" + std::to_string(n2) + " label " + std::to_string(j) +
                             " does not extend its parent");
    }
    block.labels.push_back(
        ProjLabel{n1 + 1, std::vector<LegEntry>(full.begin() + n1, full.end())});
  }
  return block;
}

std::vector<ProjLabel> TauerConstruction::gamma_projection(const TowerRational& t, int n) const {
  const auto a = approximant(t, n);
  const std::int64_t split = cut(t, n);
  std::vector<ProjLabel> out;
  out.reserve(static_cast<std::size_t>(split));
  for (std::int64_t m = 0; m < split; ++m) out.push_back(a->label(m));
  return out;
}

std::vector<ProjLabel> TauerConstruction::common_cutdown(const TowerRational& s,
                                                         const TowerRational& t, int n) const {
  if (!(s < t)) throw std::invalid_argument("common cutdown requires s < t");
  const auto a = approximant(s, n);
  check_level(t, n);
  const std::int64_t lo = cut(s, n);
  const std::int64_t hi = cut(t, n);
  std::vector<ProjLabel> out;
  for (std::int64_t m = 0; m < a->size(); ++m) {
    if (m < lo || m >= hi) out.push_back(a->label(m));
  }
  return out;
}

double trace_pairing(const ProjLabel& a, const ProjLabel& b, const LegFamilies& families) {
  if (a.first_leg != b.first_leg || a.legs.size() != b.legs.size()) {
    throw std::invalid_argument("label level mismatch");
  }
  double product = 1.0;
  for (std::size_t i = 0; i < a.legs.size(); ++i) {
    const OrthoFamily& fam = families.leg(a.first_leg + static_cast<int>(i));
    product *= std::norm(fam.overlap(a.legs[i].masa, a.legs[i].vec, b.legs[i].masa,
                                     b.legs[i].vec));
    if (product == 0.0) break;
  }
  return product;
}

double orthonormality_defect(std::span<const ProjLabel> labels, const LegFamilies& families) {
  double worst = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    worst = std::max(worst, std::abs(trace_pairing(labels[i], labels[i], families) - 1.0));
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      worst = std::max(worst, trace_pairing(labels[i], labels[j], families));
    }
  }
  return worst;
}

std::int64_t label_space_dim(const ProjLabel& label, const LegFamilies& families) {
  std::int64_t dim = 1;
  for (int r = label.first_leg; r <= label.last_leg(); ++r) dim *= families.leg(r).prime();
  return dim;
}

ComplexVector label_vector(const ProjLabel& label, const LegFamilies& families) {
  if (label.legs.empty()) throw std::invalid_argument("empty label");
  ComplexVector v = families.leg(label.first_leg).vector(label.legs[0].masa, label.legs[0].vec);
  for (std::size_t i = 1; i < label.legs.size(); ++i) {
    const auto& e = label.legs[i];
    v = kron(v, families.leg(label.first_leg + static_cast<int>(i)).vector(e.masa, e.vec));
  }
  return v;
}

ComplexMatrix label_basis(std::span<const ProjLabel> labels, const LegFamilies& families) {
  if (labels.empty()) throw std::invalid_argument("empty label list");
  const std::int64_t dim = label_space_dim(labels.front(), families);
  if (dim > kDenseDimLimit) throw std::length_error("dense materialization refused at this level");
  ComplexMatrix basis(dim, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j].first_leg != labels.front().first_leg ||
        labels[j].legs.size() != labels.front().legs.size()) {
      throw std::invalid_argument("label level mismatch");
    }
    basis.col(static_cast<Eigen::Index>(j)) = label_vector(labels[j], families);
  }
  return basis;
}

ComplexMatrix materialize(std::span<const ProjLabel> labels, const LegFamilies& families) {
  const ComplexMatrix v = label_basis(labels, families);
  return v * v.adjoint();
}

std::string format_label(const ProjLabel& label) {
  std::ostringstream out;
  for (const auto& e : label.legs) out << '(' << e.masa << ',' << e.vec << ')';
  return out.str();
}

std::string dump_labels(const Approximant& approximant) {
  std::ostringstream out;
  for (std::int64_t m = 0; m < approximant.size(); ++m) {
    out << m << ": ";
    for (const auto& e : approximant.legs(m)) out << '(' << e.masa << ',' << e.vec << ')';
    out << '\n';
  }
  return out.str();
}

}  // namespace tauer
