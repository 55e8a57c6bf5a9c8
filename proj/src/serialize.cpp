#include "tauer/serialize.hpp"

#include <stdexcept>

namespace tauer {

using nlohmann::json;

json to_json(const PrimeTower& tower) {
  json primes = json::array();
  json products = json::array();
  for (const auto& k : tower.primes()) primes.push_back(k.str());
  for (const auto& p : tower.products()) products.push_back(p.str());
  return json{{"primes", primes}, {"products", products}};
}

PrimeTower tower_from_json(const json& j) {
  std::vector<BigInt> primes;
  for (const auto& k : j.at("primes")) {
    primes.emplace_back(k.is_string() ? k.get<std::string>() : k.dump());
  }
  PrimeTower tower = PrimeTower::from_primes(std::move(primes));
  if (j.contains("products")) {
    const auto& products = j.at("products");
    if (products.size() != static_cast<std::size_t>(tower.depth())) {
      throw std::invalid_argument("products list does not match primes");
    }
    for (int n = 1; n <= tower.depth(); ++n) {
      if (BigInt(products[static_cast<std::size_t>(n - 1)].get<std::string>()) != tower.product(n)) {
        throw std::invalid_argument("products list does not match primes");
      }
    }
  }
  return tower;
}

json to_json(const TowerRational& t) {
  return json{{"num", t.numerator().str()}, {"level", t.level()}};
}

TowerRational rational_from_json(const PrimeTower& tower, const json& j) {
  return TowerRational(tower, BigInt(j.at("num").get<std::string>()), j.at("level").get<int>());
}

json to_json(const OrthoFamily& family) {
  json bases = json::array();
  for (std::uint32_t m = 0; m < family.size(); ++m) {
    const MasaBasis b = family.basis(m);
    json entries = json::array();
    for (Eigen::Index col = 0; col < b.basis.cols(); ++col) {
      for (Eigen::Index row = 0; row < b.basis.rows(); ++row) {
        entries.push_back(json::array({b.basis(row, col).real(), b.basis(row, col).imag()}));
      }
    }
    bases.push_back(std::move(entries));
  }
  return json{{"p", family.prime()}, {"count", family.size()}, {"bases", bases}};
}

json to_json(const GapEstimate& gap) {
  return json{{"s", gap.s.to_string()},
              {"t", gap.t.to_string()},
              {"n", gap.level},
              {"lower", gap.lower},
              {"upper", gap.upper},
              {"upper_principal_angles", gap.upper_principal_angles},
              {"probes", gap.probes},
              {"iterations", gap.iterations},
              {"converged", gap.converged},
              {"bound", gap.bound}};
}

json to_json(const Certificate& cert) {
  json params = json::object();
  for (const auto& [key, value] : cert.params) params[key] = value;
  return json{{"kind", to_string(cert.kind)}, {"params", params},
              {"defect", cert.defect},       {"threshold", cert.threshold},
              {"pass", cert.pass()},         {"witness", cert.witness},
              {"seed", cert.seed}};
}

json to_json(const ContinuityReport& report) {
  return json{{"s", report.s.to_string()},
              {"t", report.t.to_string()},
              {"n", report.level},
              {"gamma_difference", report.gamma_difference.str()},
              {"implied_bound", report.implied_bound},
              {"gap_lower", report.gap_lower},
              {"gap_upper", report.gap_upper},
              {"pass", report.pass}};
}

}  // namespace tauer
