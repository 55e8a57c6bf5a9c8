#include "tauer/report.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "tauer/serialize.hpp"

namespace tauer {

namespace {

constexpr int kMaxConstructionDepth = 6;
constexpr double kBoundSlack = 1e-8;
// Dense corner checks cost O(dim^3) per product; 1806 takes minutes.
constexpr std::int64_t kAnticommutationDimLimit = 256;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T parsed{};
  in >> parsed;
  if (in.fail() || !in.eof()) throw ConfigError("invalid value for " + key + ": '" + value + "'");
  return parsed;
}

/// Runs body(i) for i in [0, count) on a small worker pool. Results are
/// written by index, so output order does not depend on the schedule.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

std::string claim_for(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::kSingularity: return "singularity: E_{A^(f)}(w_e) = 0 for f != e";
    case CertificateKind::kBlockOrthogonality: return "block masas above the cut are orthogonal";
    case CertificateKind::kGammaCommutation: return "trace-free unitary in A p commutes with pNp";
    case CertificateKind::kAnticommutation: return "||[u,x]q||_2^2 = 2tr(q) below 1-p";
    case CertificateKind::kCutdown: return "A(s)q = A(t)q with tr(q) = 1-(t-s)";
  }
  return "";
}

std::string params_string(const Certificate& cert) {
  std::string s;
  for (const auto& [k, v] : cert.params) s += (s.empty() ? "" : ";") + k + "=" + v;
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> ordered_pairs(std::size_t count) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

struct Runner {
  const ScenarioConfig& config;
  std::ostream& out;
  std::ostream& err;

  int tower_cmd() {
    const PrimeTower tower = build_prime_tower(config.depth);
    const auto j = to_json(tower);
    open_output(config.out, "tower.json") << j.dump(2) << '\n';
    out << j.dump() << '\n';
    return 0;
  }

  int family_cmd(const PrimeTower& tower) {
    const TauerConstruction c(tower);
    auto csv = open_output(config.out, "family.csv");
    csv << "leg,p,count,cross_defect,completeness_defect,pass,claim\n";
    bool ok = true;
    // Dense verification of every masa pair is limited to the legs whose
    // bases are small enough to hold (k_r <= 43 for the default tower).
    const int legs = std::min(tower.depth(), 4);
    for (int r = 1; r <= legs; ++r) {
      const OrthoFamily& fam = c.families().leg(r);
      const double cross = family_cross_defect(fam);
      const double complete = family_completeness_defect(fam);
      const bool pass = cross <= config.tolerance && complete <= 1e-12;
      ok = ok && pass;
      csv << r << ',' << fam.prime() << ',' << fam.size() << ',' << fmt(cross) << ','
          << fmt(complete) << ',' << (pass ? "true" : "false")
          << ",pairwise orthogonal masas in M_k\n";
      open_output(config.out, "family_leg" + std::to_string(r) + ".json") << to_json(fam).dump()
                                                                          << '\n';
      out << "leg " << r << " p=" << fam.prime() << " masas=" << fam.size()
          << " cross_defect=" << fmt(cross) << (pass ? " ok" : " FAIL") << '\n';
    }
    return ok ? 0 : 1;
  }

  int approximant_cmd(const PrimeTower& tower, const std::vector<TowerRational>& points) {
    const TauerConstruction c(tower);
    auto dump = open_output(config.out, "approximants_L" + std::to_string(config.level) + ".txt");
    for (const auto& t : points) {
      const auto a = c.approximant(t, config.level);
      dump << "# t=" << t.to_string() << " level=" << config.level << '\n' << dump_labels(*a);
      out << "t=" << t.to_string() << " labels=" << a->size() << '\n';
    }
    return 0;
  }

  struct PairResult {
    TowerRational s;
    TowerRational t;
    std::optional<GapEstimate> gap;
    std::string error;
  };

  std::vector<PairResult> gaps(const TauerConstruction& c, const std::vector<TowerRational>& points) {
    const auto pairs = ordered_pairs(points.size());
    std::vector<PairResult> results;
    for (const auto& [i, j] : pairs) results.push_back({points[i], points[j], std::nullopt, ""});
    GapOptions options;
    options.random_probes = config.probes;
    options.max_iterations = config.iterations;
    options.seed = config.seed;
    parallel_for(results.size(), config.threads, [&](std::size_t i) {
      try {
        results[i].gap = gap_estimate(c, results[i].s, results[i].t, config.level, options);
      } catch (const std::invalid_argument& e) {
        results[i].error = e.what();
      }
    });
    return results;
  }

  int distances_cmd(const PrimeTower& tower, const std::vector<TowerRational>& points) {
    const TauerConstruction c(tower);
    const auto results = gaps(c, points);
    auto csv = open_output(config.out, "distances.csv");
    csv << "s,t,lower,upper,bound,claim\n";
    nlohmann::json all = nlohmann::json::array();
    std::size_t failed = 0;
    for (const auto& r : results) {
      if (!r.gap) {
        ++failed;
        err << "s=" << r.s.to_string() << " t=" << r.t.to_string() << ": " << r.error << '\n';
        csv << r.s.to_string() << ',' << r.t.to_string() << ",,,"
            << fmt(path_distance_bound(r.s, r.t).sqrt_bound) << ",undefined: " << r.error << '\n';
        all.push_back({{"s", r.s.to_string()}, {"t", r.t.to_string()}, {"error", r.error}});
        continue;
      }
      const GapEstimate& g = *r.gap;
      const bool pass = g.lower <= g.bound + kBoundSlack && g.lower <= g.upper + kBoundSlack;
      if (!pass) {
        ++failed;
        err << to_json(g).dump() << '\n';
      }
      csv << g.s.to_string() << ',' << g.t.to_string() << ',' << fmt(g.lower) << ','
          << fmt(g.upper) << ',' << fmt(g.bound) << ",d_inf2(A(s);A(t)) <= 2sqrt|s-t|\n";
      all.push_back(to_json(g));
    }
    open_output(config.out, "gaps.json") << all.dump(2) << '\n';
    out << results.size() << " pairs at level " << config.level << ", " << failed << " failed\n";
    return failed == 0 ? 0 : 1;
  }

  std::vector<Certificate> witness_certificates(const TauerConstruction& c,
                                                const std::vector<TowerRational>& points,
                                                bool structural) {
    const int depth = c.tower().depth();
    const int level = config.level;
    std::vector<std::function<Certificate()>> jobs;
    for (const auto& t : points) {
      const int n0 = t.canonical_level();
      if (structural) {
        int n1 = std::max(n0, 2);
        if (n1 % 2 != 0) ++n1;
        if (n1 + 1 <= depth) {
          jobs.emplace_back([&c, t, n1, this] {
            return singularity_certificate(c, t, n1, config.tolerance);
          });
        }
        if (level + 1 <= depth && level >= n0) {
          const std::int64_t size = c.tower().product_i64(level);
          for (std::int64_t m = c.cut(t, level); m < size; ++m) {
            for (std::int64_t m2 = m + 1; m2 < size; ++m2) {
              jobs.emplace_back([&c, t, m, m2, level, this] {
                return block_orthogonality_check(c, t, level, m, m2, level + 1, config.tolerance);
              });
            }
          }
        }
      }
      if (!t.is_zero()) {
        int n = n0 % 2 == 1 ? n0 : n0 + 1;
        if (n + 1 <= depth && c.tower().product_i64(n) <= kDenseDimLimit) {
          jobs.emplace_back([&c, t, n, this] {
            return gamma_commutator_check(c, t, n, config.samples, config.seed, config.tolerance);
          });
        }
      }
      if (level >= n0 && level + 1 <= depth &&
          c.tower().product_i64(level + 1) <= kAnticommutationDimLimit) {
        const std::int64_t size = c.tower().product_i64(level);
        std::vector<std::int64_t> selection;
        for (std::int64_t m = c.cut(t, level); m < size; ++m) selection.push_back(m);
        if (selection.size() >= 2) {
          jobs.emplace_back([&c, t, level, selection, this] {
            return anticommutation_check(c, t, level, selection, config.seed);
          });
        }
      }
    }
    if (structural) {
      for (const auto& [i, j] : ordered_pairs(points.size())) {
        const auto& s = points[i];
        const auto& t = points[j];
        if (s.canonical_level() <= level && t.canonical_level() <= level) {
          jobs.emplace_back([&c, s, t, level] { return cutdown_equality_check(c, s, t, level); });
        }
      }
    }
    std::vector<std::optional<Certificate>> slots(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t i) { slots[i] = jobs[i](); });
    std::vector<Certificate> certs;
    for (auto& s : slots) certs.push_back(std::move(*s));
    return certs;
  }

  int emit_certificates(const std::vector<Certificate>& certs, const std::string& stem) {
    auto csv = open_output(config.out, stem + ".csv");
    csv << "kind,params,defect,threshold,pass,claim\n";
    nlohmann::json all = nlohmann::json::array();
    std::size_t failed = 0;
    for (const auto& cert : certs) {
      csv << to_string(cert.kind) << ',' << params_string(cert) << ',' << fmt(cert.defect) << ','
          << fmt(cert.threshold) << ',' << (cert.pass() ? "true" : "false") << ','
          << claim_for(cert.kind) << '\n';
      all.push_back(to_json(cert));
      if (!cert.pass()) {
        ++failed;
        err << to_json(cert).dump() << '\n';
      }
    }
    open_output(config.out, stem + ".json") << all.dump(2) << '\n';
    out << certs.size() << " certificates, " << failed << " failed\n";
    return failed == 0 ? 0 : 1;
  }

  int certify_cmd(const PrimeTower& tower, const std::vector<TowerRational>& points) {
    const TauerConstruction c(tower);
    return emit_certificates(witness_certificates(c, points, true), "certificates");
  }

  int gamma_cmd(const PrimeTower& tower, const std::vector<TowerRational>& points) {
    const TauerConstruction c(tower);
    int status = emit_certificates(witness_certificates(c, points, false), "gamma_witnesses");

    // tr(p) = t exactly for the witness projection.
    for (const auto& t : points) {
      if (t.canonical_level() > config.level) continue;
      const auto p = c.gamma_projection(t, config.level);
      const BigRational trace(BigInt(p.size()), tower.product(config.level));
      if (trace != t.value()) {
        err << "gamma projection trace " << trace.str() << " != " << t.to_string() << '\n';
        status = 1;
      }
    }

    const auto results = gaps(c, points);
    auto csv = open_output(config.out, "gamma.csv");
    csv << "s,t,gamma_difference,implied_bound,gap_lower,gap_upper,pass,claim\n";
    bool ok = true;
    for (const auto& pr : results) {
      // The Gamma values are exact; the gap columns stay empty when the
      // distance is undefined at this level.
      GapEstimate g{pr.s, pr.t, config.level};
      if (pr.gap) g = *pr.gap;
      const ContinuityReport r = gamma_continuity_report(pr.s, pr.t, config.level, g);
      ok = ok && r.pass;
      if (!r.pass) err << to_json(r).dump() << '\n';
      csv << r.s.to_string() << ',' << r.t.to_string() << ',' << r.gamma_difference.str() << ','
          << fmt(r.implied_bound) << ',' << (pr.gap ? fmt(r.gap_lower) : "") << ','
          << (pr.gap ? fmt(r.gap_upper) : "") << ',' << (r.pass ? "true" : "false")
          << ",|Gamma(A(s))-Gamma(A(t))| <= 15 d_inf2\n";
    }
    out << results.size() << " continuity rows" << (ok ? "" : ", FAILURES") << '\n';
    return status != 0 || !ok ? 1 : 0;
  }
};

}  // namespace

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("TAUER_OUT"); env != nullptr && *env != '\0') return env;
  return "tauer_out";
}

void apply_setting(ScenarioConfig& config, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "depth") config.depth = parse_number<int>(key, value);
  else if (key == "level") config.level = parse_number<int>(key, value);
  else if (key == "grid") config.grid = value;
  else if (key == "probes") config.probes = parse_number<int>(key, value);
  else if (key == "iters") config.iterations = parse_number<int>(key, value);
  else if (key == "samples") config.samples = parse_number<int>(key, value);
  else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "out") config.out = value;
  else if (key == "tol") config.tolerance = parse_number<double>(key, value);
  else if (key == "threads") config.threads = parse_number<int>(key, value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

void load_config_file(ScenarioConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

std::vector<TowerRational> resolve_grid(const ScenarioConfig& config, const PrimeTower& tower) {
  if (config.level < 1 || config.level > config.depth) {
    throw ConfigError("level must lie in 1..depth");
  }
  if (config.probes < 0 || config.iterations < 1 || config.samples < 0) {
    throw ConfigError("probe, iteration and sample counts must be non-negative");
  }
  std::vector<TowerRational> points;
  // A bare integer names a grid level; anything else is a comma-separated
  // list of fractions (write 1/1 for t = 1).
  const std::string text = trim(config.grid.value_or(std::to_string(config.level)));
  const bool is_level = !text.empty() && text.size() < 4 &&
                        std::all_of(text.begin(), text.end(),
                                    [](unsigned char ch) { return std::isdigit(ch) != 0; });
  if (is_level) {
    const int n = std::stoi(text);
    if (n < 1 || n > config.level) throw ConfigError("grid level must lie in 1..level");
    points = grid(tower, n);
  } else {
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        points.push_back(parse_tower_rational(tower, item));
      } catch (const std::exception& e) {
        throw ConfigError("grid value '" + item + "': " + e.what());
      }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
  }
  if (points.empty()) throw ConfigError("empty parameter grid");
  for (const auto& t : points) {
    if (t.canonical_level() > config.level) {
      throw ConfigError("grid value " + t.to_string() + " is not defined at level " +
                        std::to_string(config.level));
    }
  }
  return points;
}

int run(const std::string& subcommand, const ScenarioConfig& config, std::ostream& out,
        std::ostream& err) {
  try {
    if (std::find(std::begin(kSubcommands), std::end(kSubcommands), subcommand) ==
        std::end(kSubcommands)) {
      throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    if (config.depth < 1) throw ConfigError("depth must be >= 1");
    Runner runner{config, out, err};
    if (subcommand == "tower") return runner.tower_cmd();
    if (config.depth > kMaxConstructionDepth) {
      throw ConfigError("depth above " + std::to_string(kMaxConstructionDepth) +
                        " is not supported for label construction");
    }
    const PrimeTower tower = build_prime_tower(config.depth);
    if (subcommand == "family") return runner.family_cmd(tower);
    const auto points = resolve_grid(config, tower);
    if (tower.product_i64(config.level) > TauerConstruction::kMaxLabels) {
      throw ConfigError("level too deep for label enumeration");
    }
    if (subcommand == "approximant") return runner.approximant_cmd(tower, points);
    if (subcommand == "distances") return runner.distances_cmd(tower, points);
    if (subcommand == "certify") return runner.certify_cmd(tower, points);
    return runner.gamma_cmd(tower, points);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace tauer
