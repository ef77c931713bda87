#include "siqrng/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "siqrng/bits.hpp"
#include "siqrng/discretization.hpp"
#include "siqrng/error.hpp"
#include "siqrng/evb.hpp"
#include "siqrng/extractor.hpp"
#include "siqrng/protocol.hpp"
#include "siqrng/randomness_tests.hpp"

namespace siqrng {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(master ^ splitmix64(a)) ^ b);
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
  double stderr_mean = 0.0;
};

Stats summarize(const std::vector<double>& v) {
  Stats s;
  const auto n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.stderr_mean = s.std / std::sqrt(n);
  return s;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

// Multinomial(n, p) by conditional binomials.
std::vector<std::uint64_t> multinomial(std::uint64_t n, const std::vector<double>& p, std::mt19937_64& rng) {
  std::vector<std::uint64_t> out(p.size(), 0);
  double mass_left = 1.0;
  std::uint64_t left = n;
  for (std::size_t i = 0; i + 1 < p.size() && left > 0; ++i) {
    const double q = mass_left > 0.0 ? std::clamp(p[i] / mass_left, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> b(left, q);
    out[i] = b(rng);
    left -= out[i];
    mass_left -= p[i];
  }
  out.back() += left;
  return out;
}

}  // namespace

TheoryPoint theory_point(const SourceModel& source, double delta, int m, ConstantMode mode) {
  const BinningScheme scheme(m, delta);
  TheoryPoint t;
  t.label = std::string(to_string(source.kind));
  t.v_check = source.v_check;
  t.v_data = source.v_data;
  t.delta = delta;
  t.m = m;
  t.h_min_q = h_min_pmf(discretized_gaussian_pmf(std::sqrt(source.v_data), scheme));
  t.h_max_p = h_max_pmf(discretized_gaussian_pmf(std::sqrt(source.v_check), scheme));
  t.c = incompatibility_constant(delta, delta, mode);
  t.h_low_p = h_low(t.h_max_p, t.c);
  return t;
}

TheoryPoint theory_point_pure(double sigma_p, double delta, int m, ConstantMode mode) {
  auto t = theory_point(SourceModel::custom(sigma_p * sigma_p, 1.0 / (sigma_p * sigma_p)), delta, m, mode);
  t.label = "pure";
  return t;
}

void write_theory_csv(std::ostream& out, const std::vector<TheoryPoint>& points) {
  out << "label,v_check,v_data,delta,m,h_min_q,h_max_p,c,h_low_p\n";
  out.precision(12);
  for (const auto& t : points) {
    out << t.label << ',' << t.v_check << ',' << t.v_data << ',' << t.delta << ',' << t.m << ',' << t.h_min_q << ','
        << t.h_max_p << ',' << t.c << ',' << t.h_low_p << '\n';
  }
}

std::vector<BiasRow> bias_simulation(const BiasSimConfig& config) {
  if (config.repetitions < 2) throw std::invalid_argument("bias simulation needs at least two repetitions");
  if (config.estimators.empty() || config.n_values.empty()) return {};
  const BinningScheme scheme(config.m, config.delta);
  const Lattice evb_lattice = evb_support(scheme);
  const TheoryPoint th = theory_point(config.source, config.delta, config.m, config.constant);

  struct Cell {
    EstimatorKind kind;
    std::size_t n;
  };
  std::vector<Cell> cells;
  for (auto kind : config.estimators) {
    for (auto n : config.n_values) cells.push_back({kind, n});
  }
  std::vector<BiasRow> rows(cells.size());

  parallel_for(cells.size(), config.threads, [&](std::size_t i) {
    const Cell cell = cells[i];
    const bool h_min = cell.kind == EstimatorKind::freq_min;
    DetectorModel det;
    det.seed = derive_seed(config.seed, static_cast<std::uint64_t>(cell.kind), cell.n);
    QuadratureSource src(config.source, det);

    BiasRow& row = rows[i];
    row.estimator = cell.kind;
    row.quantity = h_min ? "h_min" : "h_low";
    row.n = cell.n;
    row.repetitions = config.repetitions;
    row.theory = h_min ? th.h_min_q : th.h_low_p;

    std::vector<double> values(config.repetitions);
    for (auto& v : values) {
      const RawBlock raw = src.draw_block(h_min ? Quadrature::data : Quadrature::check, cell.n);
      const Histogram h = accumulate(raw.samples, scheme);
      switch (cell.kind) {
        case EstimatorKind::freq_min: v = h_min_freq(h).value; break;
        case EstimatorKind::freq_max: v = h_low(h_max_freq(h).value, th.c); break;
        case EstimatorKind::bayes_up: v = h_low(h_max_bayes_uniform(h).value, th.c); break;
        case EstimatorKind::bayes_pp: v = h_low(h_max_bayes_peaked(h, config.concentration).value, th.c); break;
        case EstimatorKind::evb: {
          const auto e = h_max_evb(evb_lattice, unbiased_variance(raw.samples));
          row.fallbacks += e.aux.fallback;
          v = h_low(e.value, th.c);
          break;
        }
      }
    }
    const Stats s = summarize(values);
    row.mean = s.mean;
    row.std = s.std;
    row.stderr_mean = s.stderr_mean;
  });
  return rows;
}

void write_bias_csv(std::ostream& out, const std::vector<BiasRow>& rows) {
  out << "estimator,quantity,n,repetitions,mean,std,stderr,theory,fallbacks\n";
  out.precision(12);
  for (const auto& r : rows) {
    out << to_string(r.estimator) << ',' << r.quantity << ',' << r.n << ',' << r.repetitions << ',' << r.mean << ','
        << r.std << ',' << r.stderr_mean << ',' << r.theory << ',' << r.fallbacks << '\n';
  }
}

std::vector<NineBinPmf> builtin_ninebin_pmfs() {
  auto normalized = [](std::vector<double> w) {
    const double t = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= t;
    return w;
  };
  std::vector<double> peak(9);
  std::vector<double> bimodal(9);
  for (int k = -4; k <= 4; ++k) {
    peak[static_cast<std::size_t>(k + 4)] = std::exp(-0.5 * k * k);
    bimodal[static_cast<std::size_t>(k + 4)] = std::exp(-0.5 * (k - 2) * (k - 2)) + std::exp(-0.5 * (k + 2) * (k + 2));
  }
  return {{"uniform", std::vector<double>(9, 1.0 / 9.0)},
          {"single_peak", normalized(peak)},
          {"bimodal", normalized(bimodal)}};
}

NineBinPmf load_ninebin_pmf(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream is(text);
  std::vector<double> p{std::istream_iterator<double>(is), std::istream_iterator<double>()};
  if (!is.eof()) throw std::invalid_argument(path.string() + ": not a list of numbers");
  if (p.size() != 9) throw std::invalid_argument(path.string() + ": expected 9 probabilities");
  Pmf(Lattice::symmetric(4, 1.0), p);  // validates sum and signs
  return {path.stem().string(), std::move(p)};
}

std::vector<NineBinRow> ninebin_study(const NineBinConfig& config) {
  if (config.repetitions < 2) throw std::invalid_argument("nine-bin study needs at least two repetitions");
  const Lattice support = Lattice::symmetric(4, 1.0);
  const std::vector<EstimatorKind> kinds{EstimatorKind::freq_max, EstimatorKind::bayes_up, EstimatorKind::bayes_pp,
                                         EstimatorKind::evb};
  std::vector<NineBinRow> rows;
  for (std::size_t pi = 0; pi < config.pmfs.size(); ++pi) {
    const auto& pmf = config.pmfs[pi];
    const Pmf truth(support, pmf.p);
    const double theory = h_max_pmf(truth);
    for (std::size_t n : config.n_values) {
      std::mt19937_64 rng(derive_seed(config.seed, pi, n));
      std::vector<std::vector<double>> values(kinds.size(), std::vector<double>(config.repetitions));
      for (std::size_t r = 0; r < config.repetitions; ++r) {
        const auto counts = multinomial(n, pmf.p, rng);
        values[0][r] = h_max_freq(counts).value;
        values[1][r] = h_max_bayes_uniform(counts).value;
        values[2][r] = h_max_bayes_peaked(counts, config.concentration).value;
        // Sample variance of the bin positions.
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
          const double x = support.point(i);
          s1 += static_cast<double>(counts[i]) * x;
          s2 += static_cast<double>(counts[i]) * x * x;
        }
        const auto nd = static_cast<double>(n);
        const double var = n > 1 ? (s2 - s1 * s1 / nd) / (nd - 1.0) : 0.0;
        values[3][r] = h_max_evb(support, var).value;
      }
      for (std::size_t e = 0; e < kinds.size(); ++e) {
        const Stats s = summarize(values[e]);
        rows.push_back({pmf.name, kinds[e], n, config.repetitions, s.mean, s.std, s.stderr_mean, theory,
                        s.mean < theory});
      }
    }
  }
  return rows;
}

void write_ninebin_csv(std::ostream& out, const std::vector<NineBinRow>& rows) {
  out << "pmf,estimator,n,repetitions,mean,std,stderr,theory,below_theory\n";
  out.precision(12);
  for (const auto& r : rows) {
    out << r.pmf << ',' << to_string(r.estimator) << ',' << r.n << ',' << r.repetitions << ',' << r.mean << ','
        << r.std << ',' << r.stderr_mean << ',' << r.theory << ',' << int{r.below} << '\n';
  }
}

bool run_selftest(std::ostream& out, std::uint64_t seed) {
  bool all = true;
  auto check = [&](const std::string& name, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    all = all && ok;
  };

  check("secure length 16000 x 7 bits at 1e-10", secure_length(16000, 7.0, 1e-10) == 111933);

  const auto cp = pass_proportion_interval(1000, 0.01);
  check("Clopper-Pearson band for 1000 samples",
        std::abs(cp.low - 0.978724) < 5e-7 && std::abs(cp.high - 0.996273) < 5e-7);

  {
    int checks = 0;
    for (unsigned v = 0; v < 128; ++v) {
      BitReservoir r;
      BitVector b;
      b.append_bits(v, kDecisionBits);
      r.refill(b);
      checks += decide_next_phase(r).phase == Phase::check;
    }
    check("phase rule selects 13 of 128", checks == 13);
  }

  {
    const std::uint64_t zero[2] = {0, 0};
    check("uniform-prior estimator at m=2, n=0", std::abs(h_max_bayes_uniform(zero).value - 0.830075) < 1e-6);
  }

  {
    std::mt19937_64 rng(seed);
    bool same = true;
    for (int i = 0; i < 20 && same; ++i) {
      const std::size_t n = 1 + rng() % 4096;
      const std::size_t l = rng() % (n + 1);
      const auto s = ToeplitzSeed::random(l, n, rng);
      BitVector x(n);
      for (std::size_t j = 0; j < n; ++j) x.set(j, rng() & 1U);
      same = toeplitz_hash(x, s, l) == toeplitz_hash_naive(x, s, l);
    }
    check("Toeplitz hash matches the row-by-row definition", same);
  }

  {
    BitVector b;
    for (int i = 0; i < 100; ++i) b.push_back(i < 60);
    check("monobit on 60 ones in 100 bits", std::abs(monobit(b).p_value - 0.0455002638963584) < 1e-9);
  }

  {
    const auto t = theory_point(SourceModel::vacuum(), 0.0155607, 4096);
    check("vacuum bound consistent with the data min-entropy", t.h_min_q - t.h_low_p >= 0.0);
  }

  {
    ProtocolConfig pc;
    pc.master_seed = seed;
    pc.detector.seed = seed;
    ProtocolEngine engine(pc);
    const auto s = engine.run_session(20);
    check("20-block vacuum session without aborts",
          s.aborted_blocks == 0 && s.bits_emitted > 0 && s.bits_consumed + s.bits_banked == s.bits_emitted);
  }
  return all;
}

}  // namespace siqrng
