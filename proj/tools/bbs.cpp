// Command-line front end: seeded samplers, evolution traces, current
// statistics, tagged-particle runs, invariance tests, reconstruction,
// closed-form constants and rate functions, the continuum scaling
// experiment, and the acceptance self-test.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "acceptance_suite.hpp"
#include "bbs/analysis.hpp"
#include "bbs/closedform.hpp"
#include "bbs/continuum.hpp"
#include "bbs/core.hpp"
#include "bbs/gen.hpp"
#include "bbs/io.hpp"
#include "bbs/parallel.hpp"
#include "bbs/rng.hpp"
#include "bbs/stats.hpp"
#include "bbs/tagged.hpp"

namespace {

using namespace bbs;

struct Common {
  std::string config_file;
  std::string out_dir = ".";
  std::string input_file;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::int64_t steps = 100;
  std::int64_t replicas = 100;
  int threads = 0;
  double alpha = 0.01;
  Site depth = 40;
  std::vector<std::string> overrides;  // key=value spec tokens
};

// Collects config-file pairs plus command-line overrides.  A bare
// `k=<int>` token is shorthand for --steps; it is consumed here (the
// uppercase `K=` stays a sampler parameter).
std::string spec_text(Common& c) {
  std::string text;
  std::vector<std::string> tokens;
  if (!c.config_file.empty()) {
    std::ifstream in(c.config_file);
    if (!in) throw Error("cannot open config file '" + c.config_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::istringstream parsed(ss.str());
    for (const auto& [k, v] : io::parse_kv(parsed)) tokens.push_back(k + "=" + v);
  }
  tokens.insert(tokens.end(), c.overrides.begin(), c.overrides.end());
  for (const auto& t : tokens) {
    if (t.rfind("k=", 0) == 0) {
      c.steps = std::stoll(t.substr(2));
      continue;
    }
    text += t + " ";
  }
  return text;
}

bool mentions(const Common& c, const std::string& key) {
  for (const auto& t : c.overrides)
    if (t.rfind(key + "=", 0) == 0) return true;
  if (c.config_file.empty()) return false;
  std::ifstream in(c.config_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str().find(key + "=") != std::string::npos;
}

gen::SampleSpec resolve_spec(Common& c, const char* default_kind = nullptr) {
  std::string text = spec_text(c);
  if (default_kind && text.find("kind=") == std::string::npos)
    text = std::string("kind=") + default_kind + " " + text;
  gen::SampleSpec spec = gen::parse_spec(text);
  if (c.seed_set) spec.seed = c.seed;
  if (const char* env = std::getenv("BBS_SEED"))
    spec.seed = std::strtoull(env, nullptr, 10);
  return spec;
}

std::ofstream open_out(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  std::ofstream out(std::filesystem::path(c.out_dir) / name);
  if (!out) throw Error("cannot write to '" + c.out_dir + "/" + name + "'");
  return out;
}

// Every report starts with the effective configuration.
void header(std::ostream& out, const std::string& cmd, const gen::SampleSpec* spec,
            const Common& c) {
  out << "command=" << cmd << "\n";
  if (spec) out << gen::format_spec(*spec) << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "steps=%lld replicas=%lld threads=%d alpha=%.10g\n",
                static_cast<long long>(c.steps),
                static_cast<long long>(c.replicas), c.threads, c.alpha);
  out << buf;
}

ParticleWindow load_or_sample(Common& c, gen::SampleSpec* spec_out,
                              bool* sampled) {
  if (!c.input_file.empty()) {
    std::ifstream in(c.input_file);
    if (!in) throw Error("cannot open '" + c.input_file + "'");
    if (sampled) *sampled = false;
    return io::read_window(in);
  }
  const gen::SampleSpec spec = resolve_spec(c);
  if (spec_out) *spec_out = spec;
  if (sampled) *sampled = true;
  return gen::sample(spec);
}

int cmd_sample(Common& c) {
  const gen::SampleSpec spec = resolve_spec(c);
  const ParticleWindow w = gen::sample(spec);
  auto file = open_out(c, "sample.window");
  file << io::format_window(w);
  auto rep = open_out(c, "sample.report");
  header(rep, "sample", &spec, c);
  rep << "particles=" << w.particle_count() << "\n";
  rep << "density="
      << static_cast<double>(w.particle_count()) / static_cast<double>(w.size())
      << "\n";
  std::cout << "wrote sample.window (" << w.size() << " sites)\n";
  return 0;
}

int cmd_evolve(Common& c) {
  gen::SampleSpec spec;
  bool sampled = false;
  const ParticleWindow w = load_or_sample(c, &spec, &sampled);
  const EvolutionTrace tr = evolve(w, c.steps);
  auto trace = open_out(c, "trace.csv");
  io::write_trace_csv(trace, tr);
  auto currents = open_out(c, "currents.csv");
  io::write_current_csv(currents, analysis::make_current_record(tr.currents));
  auto rep = open_out(c, "evolve.report");
  header(rep, "evolve", sampled ? &spec : nullptr, c);
  const analysis::BoundaryReport br = analysis::boundary_report(w);
  rep << "density_hat=" << br.density_hat << "\n";
  rep << "k_hat=" << br.k_hat << "\n";
  rep << "class="
      << (br.class_guess == analysis::ClassGuess::SubCriticalLike
              ? "sub-critical-like"
              : br.class_guess == analysis::ClassGuess::CriticalLike
                    ? "critical-like"
                    : "undecided")
      << "\n";
  std::cout << "wrote trace.csv (" << tr.frames.size() << " frames)\n";
  return 0;
}

int cmd_current(Common& c) {
  gen::SampleSpec spec;
  bool sampled = false;
  ParticleWindow w;
  if (c.input_file.empty()) {
    spec = resolve_spec(c);
    sampled = true;
    // Size and place the window for an exact origin current when the
    // user gave no explicit geometry: 12 steps deep, ending at 0.
    if (!mentions(c, "n")) spec.n = 12 * c.steps + 256;
    if (!mentions(c, "origin")) spec.origin = -(spec.n - 1);
    w = gen::sample(spec);
  } else {
    w = load_or_sample(c, &spec, &sampled);
  }
  const analysis::CurrentRecord rec = analysis::current_sequence(w, c.steps);
  auto file = open_out(c, "current.csv");
  io::write_current_csv(file, rec);
  auto rep = open_out(c, "current.report");
  header(rep, "current", sampled ? &spec : nullptr, c);
  std::vector<double> x(rec.w0.begin(), rec.w0.end());
  const auto m = stats::moments(x);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "mean_w0=%.10g\nvar_w0=%.10g\nintegrated=%lld\nodd_gaps=%lld\n"
                "lag1_autocorr=%.10g\n",
                m.mean, m.variance, static_cast<long long>(rec.c.back()),
                static_cast<long long>(rec.odd_gap_count),
                stats::autocorrelation(x, 1));
  rep << buf;
  std::cout << "wrote current.csv (mean w0 = " << m.mean << ")\n";
  return 0;
}

int cmd_tagged(Common& c) {
  const gen::SampleSpec spec = resolve_spec(c);
  if (spec.kind != gen::SampleKind::IidBernoulli &&
      spec.kind != gen::SampleKind::MarkovConfig)
    throw Error("tagged: kind must be iid or markov");
  const bool iid = spec.kind == gen::SampleKind::IidBernoulli;
  if (iid && spec.p >= 0.5) throw Error("tagged: requires p < 1/2");
  const double v = iid ? 1.0 / (1.0 - 2.0 * spec.p)
                       : (1.0 - spec.p0 + spec.p1) / (1.0 - spec.p0 - spec.p1);
  const double sl2 =
      iid ? closedform::iid_constants(spec.p).sigma_l2 : v;  // spread reference
  const std::int64_t k = c.steps;
  const Site left = -(8 * k + 256);
  const Site right = static_cast<Site>(1.5 * v * static_cast<double>(k)) + 512;

  std::vector<tagged::TaggedTrace> fifo(static_cast<std::size_t>(c.replicas));
  std::vector<tagged::TaggedTrace> lifo(static_cast<std::size_t>(c.replicas));
  parallel_for(c.replicas, [&](std::int64_t r) {
    gen::SampleSpec s = spec;
    s.n = right - left + 1;
    s.origin = left;
    s.seed = Rng::replica(spec.seed, static_cast<std::uint64_t>(r)).next_u64();
    const ParticleWindow w = gen::sample(s);
    fifo[static_cast<std::size_t>(r)] = tagged::track_fifo(w, k);
    lifo[static_cast<std::size_t>(r)] = tagged::track_lifo(w, k);
  }, c.threads);

  auto traces = open_out(c, "tagged.csv");
  traces << "scheme,replica,k,x\n";
  for (std::size_t r = 0; r < fifo.size(); ++r)
    for (std::size_t j = 0; j < fifo[r].x.size(); ++j)
      traces << "fifo," << r << ',' << j << ',' << fifo[r].x[j] << '\n';
  for (std::size_t r = 0; r < lifo.size(); ++r)
    for (std::size_t j = 0; j < lifo[r].x.size(); ++j)
      traces << "lifo," << r << ',' << j << ',' << lifo[r].x[j] << '\n';

  auto rep = open_out(c, "tagged.report");
  header(rep, "tagged", &spec, c);
  rep << "reference_speed=" << v << "\n";
  rep << "--- queue scheme ---\n"
      << tagged::format_stats(tagged::tagged_stats(fifo, v, sl2));
  rep << "--- stack scheme ---\n"
      << tagged::format_stats(tagged::tagged_stats(lifo, v, sl2));
  std::cout << "wrote tagged.csv and tagged.report\n";
  return 0;
}

int cmd_invariance(Common& c) {
  const gen::SampleSpec spec = resolve_spec(c);
  const std::size_t burn = 1024;
  gen::SampleSpec sa = spec;
  sa.n = spec.n + static_cast<Site>(burn);
  gen::SampleSpec sb = sa;
  sb.seed = Rng(spec.seed).next_u64();
  const ParticleWindow a = gen::sample(sa);
  const ParticleWindow b = gen::sample(sb);
  const ParticleWindow tb = decode(pitman_T(encode(b)));
  const std::vector<std::uint8_t> rb(b.cells.rbegin(), b.cells.rend());

  auto blocks = [&](const std::vector<std::uint8_t>& cells, int len) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(1) << len, 0);
    for (std::size_t i = burn;
         i + static_cast<std::size_t>(len) <= cells.size();
         i += static_cast<std::size_t>(len) + 12) {
      std::size_t code = 0;
      for (int j = 0; j < len; ++j)
        code = code * 2 + cells[i + static_cast<std::size_t>(j)];
      ++counts[code];
    }
    return counts;
  };
  auto rep = open_out(c, "invariance.report");
  header(rep, "invariance-test", &spec, c);
  bool all = true;
  for (int len = 1; len <= 5; ++len) {
    const auto pt =
        stats::chi2_two_sample(blocks(a.cells, len), blocks(tb.cells, len));
    const auto pr =
        stats::chi2_two_sample(blocks(a.cells, len), blocks(rb, len));
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "block=%d image_p=%.6g reversal_p=%.6g pass=%d\n", len,
                  pt.p_value, pr.p_value,
                  pt.accept(c.alpha) && pr.accept(c.alpha) ? 1 : 0);
    rep << buf;
    all = all && pt.accept(c.alpha) && pr.accept(c.alpha);
  }
  {
    const CarrierWindow ca = carrier(encode(a));
    const CarrierWindow cb = carrier(encode(b));
    const int cap = 6;
    auto wblocks = [&](const CarrierWindow& cw, bool rev) {
      std::vector<std::int64_t> counts(
          static_cast<std::size_t>((cap + 1) * (cap + 1)), 0);
      for (std::size_t i = burn; i + 1 < cw.w.size(); i += 16) {
        auto x = static_cast<std::size_t>(std::min<Value>(cw.w[i], cap));
        auto y = static_cast<std::size_t>(std::min<Value>(cw.w[i + 1], cap));
        if (rev) std::swap(x, y);
        ++counts[x * (cap + 1) + y];
      }
      return counts;
    };
    const auto pw = stats::chi2_two_sample(wblocks(ca, false), wblocks(cb, true));
    char buf[96];
    std::snprintf(buf, sizeof buf, "carrier_reversal_p=%.6g pass=%d\n",
                  pw.p_value, pw.accept(c.alpha) ? 1 : 0);
    rep << buf;
    all = all && pw.accept(c.alpha);
  }
  rep << "all_pass=" << (all ? 1 : 0) << "\n";
  std::cout << (all ? "invariance tests accepted\n"
                    : "invariance tests REJECTED\n");
  return all ? 0 : 3;
}

int cmd_reconstruct(Common& c) {
  analysis::CurrentRecord rec;
  gen::SampleSpec spec;
  bool have_spec = false;
  if (!c.input_file.empty()) {
    std::ifstream in(c.input_file);
    if (!in) throw Error("cannot open '" + c.input_file + "'");
    rec = io::read_current_csv(in);
  } else {
    spec = resolve_spec(c);
    have_spec = true;
    rec = analysis::current_sequence(gen::sample(spec), c.steps);
  }
  const analysis::Reconstruction rc =
      analysis::reconstruct_from_current(rec, c.depth);
  auto file = open_out(c, "reconstruction.csv");
  io::write_reconstruction_csv(file, rc);
  auto rep = open_out(c, "reconstruct.report");
  header(rep, "reconstruct", have_spec ? &spec : nullptr, c);
  std::int64_t ambiguous = 0, determined = 0;
  for (Site d = 0; d <= rc.depth; ++d) {
    if (rc.ambiguous[static_cast<std::size_t>(d)]) ++ambiguous;
    for (const auto cell : rc.columns[static_cast<std::size_t>(d)])
      if (cell != analysis::CellState::Unknown) ++determined;
  }
  rep << "depth=" << rc.depth << "\nambiguous_columns=" << ambiguous
      << "\ndetermined_cells=" << determined << "\n";
  std::cout << "wrote reconstruction.csv (" << determined
            << " determined cells)\n";
  return 0;
}

int cmd_constants(Common& c, const std::string& family) {
  auto rep = open_out(c, "constants.report");
  char buf[512];
  const gen::SampleSpec spec =
      resolve_spec(c, family == "markov" ? "markov" : family == "bounded" ? "bounded" : "iid");
  if (family == "iid") {
    const auto k = closedform::iid_constants(spec.p);
    std::snprintf(buf, sizeof buf,
                  "family=iid\np=%.10g\nmu=%.12g\nsigma2=%.12g\nv=%.12g\n"
                  "sigma_l2=%.12g\npi0=%.12g\nmgf_domain=%.12g\n",
                  k.p, k.mu, k.sigma2, k.v, k.sigma_l2, k.pi0,
                  closedform::iid_mgf_w_domain(k.p));
    rep << buf;
  } else if (family == "markov") {
    const auto k = closedform::markov_constants(spec.p0, spec.p1);
    std::snprintf(buf, sizeof buf,
                  "family=markov\np0=%.10g\np1=%.10g\nrho=%.12g\nq0=%.12g\n"
                  "q1=%.12g\nmu=%.12g\nsigma2=%.12g\nvar_w0=%.12g\ncov1=%.12g\n",
                  k.p0, k.p1, k.rho, k.q0, k.q1, k.mu, k.sigma2, k.var_w0,
                  k.cov1);
    rep << buf;
  } else if (family == "bounded") {
    const auto pc = gen::perron_condition(spec.p, spec.K);
    std::snprintf(buf, sizeof buf,
                  "family=bounded\np=%.10g\nK=%d\nlambda=%.12g\nresidual=%.3g\n",
                  spec.p, spec.K, pc.eigen.lambda, pc.eigen.residual);
    rep << buf;
    for (int x = 0; x <= spec.K; ++x) {
      std::snprintf(buf, sizeof buf, "h_%d=%.12g pi_%d=%.12g\n", x,
                    pc.eigen.h(x), x, pc.chain.stationary(x));
      rep << buf;
    }
  } else {
    throw Error("constants: family must be iid, markov or bounded");
  }
  std::cout << "wrote constants.report\n";
  return 0;
}

int cmd_rate_function(Common& c, const std::string& family, double x_lo,
                      double x_hi, int points) {
  closedform::RateFunctionHandle h;
  const gen::SampleSpec spec = resolve_spec(
      c, family == "markov-current" ? "markov"
         : family == "bounded-current" ? "bounded" : "iid");
  h.p = spec.p;
  h.p0 = spec.p0;
  h.p1 = spec.p1;
  h.K = spec.K;
  if (family == "iid-current") {
    h.family = closedform::RateFamily::IidCurrent;
  } else if (family == "markov-current") {
    h.family = closedform::RateFamily::MarkovCurrent;
  } else if (family == "lifo-tagged") {
    h.family = closedform::RateFamily::LifoTagged;
  } else if (family == "bounded-current") {
    h.family = closedform::RateFamily::BoundedSolitonCurrent;
    // No closed form for the current chain: estimate its kernel from a
    // seeded run of the sampler.
    const std::int64_t k = std::max<std::int64_t>(c.steps, 20000);
    const Site len = 4 * k + 256;
    const ParticleWindow w =
        gen::sample_bounded_soliton(spec.p, spec.K, len, spec.seed, -(len - 1))
            .config;
    const analysis::CurrentRecord rec = analysis::current_sequence(w, k);
    const int n = spec.K + 1;
    Eigen::MatrixXd counts = Eigen::MatrixXd::Constant(n, n, 1e-9);
    for (std::size_t j = 0; j + 1 < rec.w0.size(); ++j)
      counts(static_cast<int>(rec.w0[j]), static_cast<int>(rec.w0[j + 1])) += 1.0;
    for (int i = 0; i < n; ++i) counts.row(i) /= counts.row(i).sum();
    h.current_chain = make_chain(counts);
  } else {
    throw Error("rate-function: unknown family '" + family + "'");
  }
  auto file = open_out(c, "rate.csv");
  file << "x,rate\n";
  char buf[96];
  for (int i = 0; i <= points; ++i) {
    const double x =
        x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(points);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", x,
                  closedform::rate_function(h, x));
    file << buf;
  }
  std::cout << "wrote rate.csv\n";
  return 0;
}

int cmd_scaling(const Common& c, double drift, std::vector<int> n_list,
                std::vector<double> t_list) {
  if (n_list.empty()) n_list = {64, 128};
  if (t_list.empty()) t_list = {1.0, 2.0};
  std::uint64_t seed = c.seed_set ? c.seed : 20260810;
  if (const char* env = std::getenv("BBS_SEED"))
    seed = std::strtoull(env, nullptr, 10);
  const continuum::ScalingReport rep = continuum::scaling_experiment(
      drift, n_list, t_list, static_cast<int>(c.replicas), seed, c.alpha,
      c.threads);
  auto file = open_out(c, "scaling.report");
  char buf[96];
  std::snprintf(buf, sizeof buf, "command=scaling\nseed=%llu\n",
                static_cast<unsigned long long>(seed));
  file << buf << rep.text << "all_pass=" << (rep.all_pass ? 1 : 0) << "\n";
  std::cout << (rep.all_pass ? "scaling comparisons accepted\n"
                             : "scaling comparisons REJECTED\n");
  return rep.all_pass ? 0 : 3;
}

int cmd_selftest(const Common& c) {
  const accept::Outcome out = accept::run_with_determinism_check(c.threads);
  auto file = open_out(c, "selftest.report");
  file << out.report;
  std::fputs(out.report.c_str(), stdout);
  std::printf("summary failed=%d expected_failures=%d\n", out.failed,
              out.expected_failed);
  return out.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"box-ball system toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--config", c.config_file, "key=value config file");
  auto* seed_opt = app.add_option("--seed", c.seed, "64-bit seed override");
  app.add_option("--out", c.out_dir, "output directory");
  app.add_option("--replicas", c.replicas, "replica count");
  app.add_option("--threads", c.threads, "worker threads (0 = hardware)");
  app.add_option("--alpha", c.alpha, "test significance level");
  app.add_option("--steps,-k", c.steps, "evolution steps");
  app.add_option("--input", c.input_file, "input file (window or csv)");
  app.add_option("--depth", c.depth, "reconstruction depth");

  std::string family = "iid";
  double x_lo = 0.0, x_hi = 2.0, drift = 1.0;
  int points = 50;
  std::vector<int> n_list;
  std::vector<double> t_list;

  auto* sample = app.add_subcommand("sample", "draw a seeded configuration");
  auto* evolve_cmd = app.add_subcommand("evolve", "space-time trace of the dynamics");
  auto* current = app.add_subcommand("current", "origin current record");
  auto* tagged_cmd = app.add_subcommand("tagged", "tagged-particle replicas");
  auto* inv = app.add_subcommand("invariance-test", "symmetry/invariance block tests");
  auto* recon = app.add_subcommand("reconstruct", "configuration from currents");
  auto* rate = app.add_subcommand("rate-function", "rate function on a grid");
  rate->add_option("--family", family,
                   "iid-current|markov-current|lifo-tagged|bounded-current");
  rate->add_option("--x-lo", x_lo, "grid start");
  rate->add_option("--x-hi", x_hi, "grid end");
  rate->add_option("--points", points, "grid points");
  auto* consts = app.add_subcommand("constants", "closed-form constants");
  consts->add_option("--family", family, "iid|markov|bounded");
  auto* scaling = app.add_subcommand("scaling", "dense-lattice scaling experiment");
  scaling->add_option("--drift", drift, "drift of the limiting path");
  scaling->add_option("--N", n_list, "lattice parameters");
  scaling->add_option("--t", t_list, "marginal probe times");
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");

  // Bare key=value tokens act as sampler-spec overrides everywhere.
  for (auto* sub : {sample, evolve_cmd, current, tagged_cmd, inv, recon, rate,
                    consts, scaling, selftest})
    sub->add_option("overrides", c.overrides, "key=value spec overrides");

  CLI11_PARSE(app, argc, argv);
  c.seed_set = seed_opt->count() > 0;

  try {
    if (*sample) return cmd_sample(c);
    if (*evolve_cmd) return cmd_evolve(c);
    if (*current) return cmd_current(c);
    if (*tagged_cmd) return cmd_tagged(c);
    if (*inv) return cmd_invariance(c);
    if (*recon) return cmd_reconstruct(c);
    if (*rate) return cmd_rate_function(c, family, x_lo, x_hi, points);
    if (*consts) return cmd_constants(c, family);
    if (*scaling) return cmd_scaling(c, drift, n_list, t_list);
    if (*selftest) return cmd_selftest(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
