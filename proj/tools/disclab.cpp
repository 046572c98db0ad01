// disclab: command-line front end. Exit codes: 0 success, 1 a reported check
// failed, 2 usage or input error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "disclab/config.hpp"
#include "disclab/discrepancy.hpp"
#include "disclab/experiments.hpp"
#include "disclab/fourier.hpp"
#include "disclab/geometry.hpp"
#include "disclab/io.hpp"
#include "disclab/pointsets.hpp"

namespace fs = std::filesystem;
using namespace disclab;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json num_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::vector<double> dyadic(int lo, int hi) { return dyadic_grid(lo, hi); }

/// Seed from the flag, or a fresh one announced on stderr.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  const std::uint64_t s = draw_seed();
  std::cerr << "seed=" << s << "\n";
  return s;
}

/// Destination for one command's primary output plus its manifest.
class Output {
 public:
  Output(std::string command, Json config, std::string manifest_path)
      : manifest_(std::move(command), std::move(config)), manifest_path_(std::move(manifest_path)) {}

  RunManifest& manifest() { return manifest_; }

  /// Writes `text` to `path`, or to stdout when `path` is empty.
  void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    write_file(path, text);
    manifest_.add_output(path);
  }

  void finish() {
    if (manifest_path_.empty()) {
      std::cerr << "manifest: " << manifest_.to_json().dump() << "\n";
    } else {
      manifest_.write(manifest_path_);
    }
  }

 private:
  RunManifest manifest_;
  std::string manifest_path_;
};

LambdaRange parse_lambda(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--lambda expects lo:hi, got " + s);
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw UsageError("--lambda expects numbers lo:hi, got " + s);
  }
}

/// Inline generator spec (`kind=...`) or a CSV file path.
PointSet load_points(const std::string& arg, const std::optional<std::uint64_t>& seed_flag,
                     std::optional<std::uint64_t>& used_seed) {
  if (arg.rfind("kind=", 0) == 0) {
    GeneratorSpec g = parse_generator_spec(arg);
    if (seed_flag && !g.seed) g.seed = *seed_flag;
    if (g.randomized() && !g.seed) g.seed = resolve_seed(std::nullopt);
    used_seed = g.seed;
    return generate(g);
  }
  if (!fs::exists(arg)) throw UsageError("--points: neither an inline spec nor a file: " + arg);
  return parse_points_csv(read_file(arg));
}

ProfileFunction select_profile(const std::string& profile, const std::string& body_spec, double theta) {
  if (profile == "tent") return ProfileFunction::tent();
  if (profile == "semicircle") return ProfileFunction::semicircle();
  if (profile == "body") {
    if (body_spec.empty()) throw UsageError("--profile body needs --body");
    return normalize_profile(make_body(parse_body_spec(body_spec)), Direction(theta));
  }
  throw UsageError("--profile must be tent, semicircle or body");
}

Json verify_json(const std::string& check, const std::vector<double>& grid, double min_ratio,
                 double max_ratio, bool pass) {
  Json j;
  j["check"] = check;
  j["grid"] = num_array(grid);
  j["min_ratio"] = min_ratio;
  j["max_ratio"] = max_ratio;
  j["pass"] = pass;
  return j;
}

Json fit_json(const LogLogFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
          {"slope_se", f.slope_se}, {"ci", {f.ci_lo, f.ci_hi}}, {"n", f.n}};
}

Json rows_json(const std::vector<ScalingRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back({{"j", r.j}, {"N", r.N}, {"D2", r.D2}, {"err", r.err}, {"ratio", r.ratio},
                 {"flagged", r.flagged}, {"generator", r.generator}});
  }
  return a;
}

Json policy_json(const TruncationPolicy& p) {
  return {{"M0", p.M0}, {"growth", p.growth}, {"eps_rel", p.eps_rel}, {"window", p.window},
          {"M_max", p.M_max}, {"dense", p.force_dense}, {"dense_units", to_string(p.dense_units)}};
}

Json engine_json(const EngineSpec& e) {
  Json j = {{"kind", to_string(e.kind)}};
  if (e.kind == EngineKind::mc) {
    j["samples"] = e.samples;
  } else {
    j["policy"] = policy_json(e.policy);
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disclab: discrepancy of point sets under translated and dilated convex bodies"};
  app.require_subcommand(1);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "Write the run manifest here (default: stderr, or <out-dir>/manifest.json for experiments)");

  // body info
  auto* body_cmd = app.add_subcommand("body", "Body queries");
  body_cmd->require_subcommand(1);
  auto* body_info = body_cmd->add_subcommand("info", "Area, circumradius and support intervals at 8 directions (CSV)");
  std::string body_spec_arg, out_path;
  body_info->add_option("--spec", body_spec_arg, "Body spec, e.g. kind=disk,r=0.25")->required();
  body_info->add_option("--out", out_path, "Output file (default stdout)");

  // points
  auto* points_cmd = app.add_subcommand("points", "Generate a point set (CSV)");
  std::string gen_arg;
  std::optional<std::uint64_t> seed_flag;
  points_cmd->add_option("--gen", gen_arg, "Generator spec, e.g. kind=uniform,j=64")->required();
  points_cmd->add_option("--seed", seed_flag, "Seed for randomized generators");
  points_cmd->add_option("--out", out_path, "Output file (default stdout)");

  // ft
  auto* ft_cmd = app.add_subcommand("ft", "Fourier transform of the indicator along a ray (CSV)");
  double theta = 0.0, rho_max = 64.0;
  std::string method = "auto", cache_dir;
  std::size_t oversample = 8, nodes = kProfileNodes, every = 1;
  ft_cmd->add_option("--body", body_spec_arg, "Body spec")->required();
  ft_cmd->add_option("--theta", theta, "Direction angle in radians");
  ft_cmd->add_option("--rho-max", rho_max, "Largest radius")->check(CLI::PositiveNumber);
  ft_cmd->add_option("--method", method, "auto | closed_form | fft_of_profile | quadrature")
      ->check(CLI::IsMember({"auto", "closed_form", "fft_of_profile", "quadrature"}));
  ft_cmd->add_option("--oversample", oversample, "Zero-padding factor (>= 4)");
  ft_cmd->add_option("--nodes", nodes, "Profile sample count for the FFT path");
  ft_cmd->add_option("--every", every, "Keep every k-th grid radius")->check(CLI::PositiveNumber);
  ft_cmd->add_option("--cache", cache_dir, "Spectrum cache directory (FFT path)");
  ft_cmd->add_option("--out", out_path, "Output file (default stdout)");

  // disc
  auto* disc_cmd = app.add_subcommand("disc", "Squared discrepancy averaged over translations and dilations (JSON)");
  std::string points_arg, lambda_arg = "0:1", engine_arg = "parseval", policy_arg;
  std::size_t samples = 100000;
  disc_cmd->add_option("--body", body_spec_arg, "Body spec")->required();
  disc_cmd->add_option("--points", points_arg, "Inline generator spec or CSV path")->required();
  disc_cmd->add_option("--lambda", lambda_arg, "Dilation range lo:hi");
  disc_cmd->add_option("--engine", engine_arg, "parseval | mc")->check(CLI::IsMember({"parseval", "mc"}));
  disc_cmd->add_option("--samples", samples, "Monte Carlo sample count");
  disc_cmd->add_option("--seed", seed_flag, "Seed (mc engine and randomized generators)");
  disc_cmd->add_option("--policy", policy_arg, "Truncation policy, e.g. M0=8,growth=2,M_max=64");
  disc_cmd->add_option("--out", out_path, "Output file (default stdout)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Inequality and asymptotics checks (JSON)");
  verify_cmd->require_subcommand(1);
  std::string profile = "tent";
  double sigma = 0.75;
  auto add_profile_opts = [&](CLI::App* c) {
    c->add_option("--profile", profile, "tent | semicircle | body");
    c->add_option("--body", body_spec_arg, "Body spec when --profile body");
    c->add_option("--theta", theta, "Direction angle in radians");
    c->add_option("--out", out_path, "Output file (default stdout)");
  };
  auto* v_pod = verify_cmd->add_subcommand("podkorytov", "|f̂(s)| ≤ |s|⁻¹μ_f(|s|⁻¹) over dyadic s ∈ [2, 512]");
  add_profile_opts(v_pod);
  auto* v_bil = verify_cmd->add_subcommand("bilateral", "second difference vs h^{1/2}μ_f(h) over dyadic h ∈ [2⁻¹², 2⁻³]");
  add_profile_opts(v_bil);
  auto* v_tail = verify_cmd->add_subcommand("tail", "tail and low-band L² bounds over dyadic ρ ∈ [2, 64]");
  add_profile_opts(v_tail);
  auto* v_ray = verify_cmd->add_subcommand("raylower", "ρ^{1+σ} times the dilation-averaged |χ̂| over dyadic ρ ∈ [8, 1024]");
  v_ray->add_option("--body", body_spec_arg, "Body spec")->required();
  v_ray->add_option("--theta", theta, "Direction angle in radians");
  v_ray->add_option("--sigma", sigma, "Decay exponent")->required();
  v_ray->add_option("--out", out_path, "Output file (default stdout)");
  auto* v_chords = verify_cmd->add_subcommand("chords", "C_σ and C₁ pole chords against the regime formulas");
  v_chords->add_option("--sigma", sigma, "σ in [1/2, 1]; 1 selects C₁")->required();
  v_chords->add_option("--out", out_path, "Output file (default stdout)");
  auto* v_cassels = verify_cmd->add_subcommand("cassels", "lattice sum over Ω∖U against N·area(Ω)/4 − card(U∩Z²)N²");
  std::size_t n_points = 100;
  std::string cassels_gen = "uniform";
  double c3 = 4.0, r_u = 2.0;
  v_cassels->add_option("--n", n_points, "Number of points")->check(CLI::PositiveNumber);
  v_cassels->add_option("--seed", seed_flag, "Seed for the uniform generator");
  v_cassels->add_option("--generator", cassels_gen, "uniform | grid")->check(CLI::IsMember({"uniform", "grid"}));
  v_cassels->add_option("--c3", c3, "Ω radius is c3·√N");
  v_cassels->add_option("--r-u", r_u, "U radius");
  v_cassels->add_option("--out", out_path, "Output file (default stdout)");
  auto* v_equiv = verify_cmd->add_subcommand("equivalence", "Hölder exponent from the smallest split chord");
  std::optional<double> expect;
  double tol = 0.1;
  v_equiv->add_option("--body", body_spec_arg, "Body spec")->required();
  v_equiv->add_option("--expect", expect, "Expected exponent");
  v_equiv->add_option("--tol", tol, "Allowed deviation from --expect");
  v_equiv->add_option("--out", out_path, "Output file (default stdout)");
  auto* v_lemma = verify_cmd->add_subcommand("lemma-g", "roots of (1+x)^{1/σ}−1−x/σ = y over dyadic y ∈ [2⁻²⁰, 2²⁰]");
  v_lemma->add_option("--sigma", sigma, "σ in (1/2, 1)")->required();
  v_lemma->add_option("--out", out_path, "Output file (default stdout)");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Sweeps driven by a config file (CSV + JSON + manifest)");
  exp_cmd->require_subcommand(1);
  std::string config_path, out_dir = ".";
  auto add_exp_opts = [&](CLI::App* c) {
    c->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    c->add_option("--seed", seed_flag, "Seed (overrides the config)");
    c->add_option("--out-dir", out_dir, "Directory for outputs");
  };
  auto* e_scaling = exp_cmd->add_subcommand("scaling", "log–log slope of D² against N");
  add_exp_opts(e_scaling);
  auto* e_env = exp_cmd->add_subcommand("envelope", "D²/N^exponent across generators");
  add_exp_opts(e_env);
  auto* e_budget = exp_cmd->add_subcommand("budget", "Γ-partition of the grid lattice sum");
  add_exp_opts(e_budget);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    Json echo;
    for (const auto* sub : app.get_subcommands()) {
      std::string path = sub->get_name();
      for (const auto* s2 : sub->get_subcommands()) path += " " + s2->get_name();
      echo["command"] = path;
    }
    echo["argv"] = std::vector<std::string>(argv + 1, argv + argc);
    const std::string command = echo["command"].get<std::string>();

    // ---------------------------------------------------------------- body
    if (body_info->parsed()) {
      Output out(command, echo, manifest_path);
      const ConvexBody body = make_body(parse_body_spec(body_spec_arg));
      std::ostringstream os;
      os << "# body=" << to_string(body.spec()) << "\n";
      os << "theta,support_lo,support_hi,width,area,circumradius\n";
      for (int k = 0; k < 8; ++k) {
        const Direction d(kPi * k / 4.0);
        const auto [lo, hi] = support_interval(body, d);
        os << fmt(d.theta()) << "," << fmt(lo) << "," << fmt(hi) << "," << fmt(hi - lo) << ","
           << fmt(body.area()) << "," << fmt(body.circumradius()) << "\n";
      }
      out.emit(os.str(), out_path);
      out.finish();
      return 0;
    }

    // -------------------------------------------------------------- points
    if (points_cmd->parsed()) {
      GeneratorSpec g = parse_generator_spec(gen_arg);
      if (seed_flag) g.seed = *seed_flag;
      if (g.randomized() && !g.seed) g.seed = resolve_seed(std::nullopt);
      echo["generator"] = to_string(g);
      Output out(command, echo, manifest_path);
      out.manifest().set_seed(g.seed);
      out.emit(points_csv(generate(g)), out_path);
      out.finish();
      return 0;
    }

    // ------------------------------------------------------------------ ft
    if (ft_cmd->parsed()) {
      const ConvexBody body = make_body(parse_body_spec(body_spec_arg));
      const Direction dir(theta);
      echo["body"] = to_string(body.spec());
      Output out(command, echo, manifest_path);
      std::string chosen = method;
      if (chosen == "auto") {
        const bool closed = body.disk_radius() || !body.polygon().empty();
        chosen = closed ? "closed_form" : "fft_of_profile";
      }
      std::ostringstream os;
      os << "rho,re,im,abs,method\n";
      if (chosen == "fft_of_profile") {
        RaySpectrum sp;
        if (!cache_dir.empty()) {
          const auto c = cache_spectrum(body, dir, rho_max, cache_dir, oversample, nodes);
          sp = c.spectrum;
          out.manifest().note("cache_hit", c.hit);
          out.manifest().note("cache_file", c.path.string());
        } else {
          sp = ray_spectrum(body, dir, rho_max, oversample, nodes);
        }
        for (std::size_t k = 0; k < sp.rho.size(); k += every) {
          os << fmt(sp.rho[k]) << "," << fmt(sp.ft[k].real()) << "," << fmt(sp.ft[k].imag()) << ","
             << fmt(std::abs(sp.ft[k])) << "," << chosen << "\n";
        }
      } else {
        if (chosen == "closed_form" && !body.disk_radius() && body.polygon().empty()) {
          throw UsageError("--method closed_form needs a disk or polygon body");
        }
        const ProfileFunction f = normalize_profile(body, dir);
        const Slicer sl = slicer(body, dir);
        const double step = 1.0 / (static_cast<double>(oversample) * sl.width());
        const auto q_max = static_cast<std::size_t>(std::ceil(rho_max / step));
        for (std::size_t q = 0; q <= q_max; q += every) {
          const double rho = static_cast<double>(q) * step;
          cplx v;
          if (chosen == "closed_form") {
            v = ft_body(body, dir.unit() * rho);
          } else {
            // χ̂(ρΘ) = half-width · e^{−2πiρ·mid} · f̂(ρ·half-width)
            const double half = 0.5 * (f.B() - f.A()), mid = 0.5 * (f.A() + f.B());
            v = half * unit_phase(-rho * mid) * ft_profile(f, rho * half);
          }
          os << fmt(rho) << "," << fmt(v.real()) << "," << fmt(v.imag()) << "," << fmt(std::abs(v))
             << "," << chosen << "\n";
        }
      }
      out.emit(os.str(), out_path);
      out.finish();
      return 0;
    }

    // ---------------------------------------------------------------- disc
    if (disc_cmd->parsed()) {
      const ConvexBody body = make_body(parse_body_spec(body_spec_arg));
      const LambdaRange range = parse_lambda(lambda_arg);
      std::optional<std::uint64_t> used_seed;
      const PointSet P = load_points(points_arg, seed_flag, used_seed);
      EngineSpec eng;
      eng.kind = engine_kind_from_string(engine_arg);
      eng.samples = samples;
      if (!policy_arg.empty()) eng.policy = parse_policy(policy_arg);
      std::uint64_t mc_seed = 0;
      if (eng.kind == EngineKind::mc) {
        mc_seed = seed_flag ? *seed_flag : (used_seed ? *used_seed : resolve_seed(std::nullopt));
        used_seed = mc_seed;
      }
      Json cfg = {{"body", to_string(body.spec())}, {"points", P.generator()}, {"N", P.size()},
                  {"lambda", {range.lo, range.hi}}, {"engine", engine_json(eng)}};
      if (used_seed) cfg["seed"] = *used_seed;
      echo["config"] = cfg;
      Output out(command, echo, manifest_path);
      out.manifest().set_seed(used_seed);
      const auto est = run_engine(body, P, range, eng, mc_seed);
      Json j;
      j["value"] = est.value;
      if (eng.kind == EngineKind::mc) {
        j["std_error"] = est.std_error;
        j["samples"] = est.samples;
      } else {
        j["tail_bound"] = est.tail_bound;
        j["truncation_radius"] = est.truncation_radius;
        j["flagged"] = est.flagged;
        j["spectra"] = est.spectra;
      }
      j["engine"] = est.engine;
      j["config"] = cfg;
      out.emit(j.dump(2) + "\n", out_path);
      out.finish();
      return 0;
    }

    // -------------------------------------------------------------- verify
    if (verify_cmd->parsed()) {
      Output out(command, echo, manifest_path);
      Json j;
      bool pass = false;
      if (v_pod->parsed()) {
        const auto grid = dyadic(1, 9);
        const auto rep = check_podkorytov(select_profile(profile, body_spec_arg, theta), grid);
        const double mn = rep.ratio.empty() ? 0.0 : *std::min_element(rep.ratio.begin(), rep.ratio.end());
        j = verify_json("podkorytov", grid, mn, rep.max_ratio, rep.pass);
        j["ratio"] = num_array(rep.ratio);
        pass = rep.pass;
      } else if (v_bil->parsed()) {
        const auto grid = dyadic(-12, -3);
        const auto rep = check_bilateral(select_profile(profile, body_spec_arg, theta), grid);
        j = verify_json("bilateral", grid, rep.ratio_min, rep.ratio_max, rep.pass);
        j["ratio"] = num_array(rep.ratio);
        pass = rep.pass;
      } else if (v_tail->parsed()) {
        const auto grid = dyadic(1, 6);
        const auto rep = check_tail(select_profile(profile, body_spec_arg, theta), grid);
        const double mn = std::min(*std::min_element(rep.ratio_tail.begin(), rep.ratio_tail.end()),
                                   *std::min_element(rep.ratio_low.begin(), rep.ratio_low.end()));
        j = verify_json("tail", grid, mn, std::max(rep.max_ratio_tail, rep.max_ratio_low), rep.pass);
        j["ratio_tail"] = num_array(rep.ratio_tail);
        j["ratio_low"] = num_array(rep.ratio_low);
        j["remainder"] = num_array(rep.remainder);
        pass = rep.pass;
      } else if (v_ray->parsed()) {
        const auto grid = dyadic(3, 10);
        const auto rep = check_ray_lower(make_body(parse_body_spec(body_spec_arg)), Direction(theta), sigma, grid);
        j = verify_json("raylower", grid, rep.inf_q, *std::max_element(rep.q.begin(), rep.q.end()), rep.pass);
        j["q"] = num_array(rep.q);
        j["argmin_rho"] = rep.argmin_rho;
        j["last_octave_slope"] = rep.last_octave_slope;
        pass = rep.pass;
      } else if (v_chords->parsed()) {
        const std::vector<double> phis = sigma >= 1.0 ? std::vector<double>{0.0, 0.01, 0.05, 0.1, 0.2, 0.24}
                                                      : std::vector<double>{0.0, 1e-3, 1e-2, 0.05, 0.1, 0.2};
        const auto deltas = dyadic(-20, -8);
        const auto rep = chord_asymptotics(sigma, phis, deltas);
        j = verify_json("chords", deltas, rep.ratio_min, rep.ratio_max, rep.pass);
        j["sigma"] = sigma;
        j["tilts"] = num_array(phis);
        j["window"] = rep.window;
        pass = rep.pass;
      } else if (v_cassels->parsed()) {
        std::optional<std::uint64_t> seed;
        PointSet P = [&] {
          if (cassels_gen == "grid") {
            const std::size_t k = std::max<std::size_t>(1, isqrt(n_points));
            return grid(k, k);
          }
          seed = resolve_seed(seed_flag);
          return uniform_points(n_points, *seed);
        }();
        out.manifest().set_seed(seed);
        const double R = c3 * std::sqrt(static_cast<double>(P.size()));
        const auto rep = cassels_check(P, R, r_u);
        // lhs against the leading term N·area(Ω)/4
        const double ratio = rep.lhs / (static_cast<double>(P.size()) * kPi * R * R / 4.0);
        j = verify_json("cassels", {R, r_u}, ratio, ratio, rep.pass);
        j["lhs"] = rep.lhs;
        j["rhs"] = rep.rhs;
        j["N"] = P.size();
        j["points"] = P.generator();
        if (seed) j["seed"] = *seed;
        pass = rep.pass;
      } else if (v_equiv->parsed()) {
        const auto deltas = dyadic(-14, -6);
        const auto rep = holder_estimate(make_body(parse_body_spec(body_spec_arg)), deltas);
        pass = std::isfinite(rep.alpha_hat) && (!expect || std::abs(rep.alpha_hat - *expect) <= tol);
        j = verify_json("equivalence", deltas, rep.alpha_hat, rep.alpha_hat, pass);
        j["alpha_hat"] = rep.alpha_hat;
        j["slope"] = rep.slope;
        j["min_split"] = num_array(rep.min_split);
        if (expect) {
          j["expect"] = *expect;
          j["tol"] = tol;
        }
      } else if (v_lemma->parsed()) {
        const auto ys = dyadic(-20, 20);
        double lo = kInf, hi = 0.0;
        Json roots = Json::array();
        for (double y : ys) {
          const auto r = lemma_g_roots(sigma, y);
          lo = std::min(lo, r.ratio_pos);
          hi = std::max(hi, r.ratio_pos);
          if (r.ratio_neg) {
            lo = std::min(lo, *r.ratio_neg);
            hi = std::max(hi, *r.ratio_neg);
          }
          roots.push_back({{"y", y}, {"root_pos", r.root_pos},
                           {"root_neg", r.root_neg ? Json(*r.root_neg) : Json(nullptr)},
                           {"scale", r.predicted_scale}});
        }
        pass = lo >= 0.1 && hi <= 10.0;
        j = verify_json("lemma-g", ys, lo, hi, pass);
        j["sigma"] = sigma;
        j["roots"] = roots;
      }
      out.emit(j.dump(2) + "\n", out_path);
      out.finish();
      return pass ? 0 : 1;
    }

    // ---------------------------------------------------------- experiment
    if (exp_cmd->parsed()) {
      const auto node = load_config(config_path);
      std::optional<std::uint64_t> cfg_seed = node->integer("seed");
      if (seed_flag) cfg_seed = seed_flag;
      const std::uint64_t seed = resolve_seed(cfg_seed);
      node->string("experiment");  // optional label, checked against the subcommand below
      const std::string stem_default = e_scaling->parsed() ? "scaling" : e_env->parsed() ? "envelope" : "budget";
      if (const auto label = node->string("experiment"); label && *label != stem_default) {
        throw UsageError("config is for experiment '" + *label + "', not '" + stem_default + "'");
      }
      echo["config_file"] = config_path;
      echo["config_text"] = read_file(config_path);
      const fs::path dir(out_dir);
      const std::string mpath = manifest_path.empty() ? (dir / "manifest.json").string() : manifest_path;
      Output out(command, echo, mpath);
      out.manifest().set_seed(seed);
      bool pass = false;
      if (e_scaling->parsed()) {
        const ExperimentConfig cfg = experiment_config_from(*node, seed);
        node->require_all_used();
        const auto rep = scaling_experiment(cfg);
        const std::string stem = cfg.output.empty() ? stem_default : cfg.output;
        std::ostringstream csv;
        csv << "N,D2,err,ratio\n";
        for (const auto& r : rep.rows) csv << r.N << "," << fmt(r.D2) << "," << fmt(r.err) << "," << fmt(r.ratio) << "\n";
        out.emit(csv.str(), (dir / (stem + ".csv")).string());
        Json j;
        j["report"] = "scaling";
        j["body"] = to_string(cfg.body);
        j["generator"] = to_string(cfg.generator.kind);
        j["lambda"] = {cfg.range.lo, cfg.range.hi};
        j["engine"] = engine_json(cfg.engine);
        j["seed"] = seed;
        j["rows"] = rows_json(rep.rows);
        j["fit"] = fit_json(rep.fit);
        j["exponent"] = rep.exponent;
        j["tolerance"] = rep.tolerance;
        j["pass"] = rep.pass;
        out.emit(j.dump(2) + "\n", (dir / (stem + ".json")).string());
        pass = rep.pass;
      } else if (e_env->parsed()) {
        const EnvelopeConfig cfg = envelope_config_from(*node, seed);
        const std::string stem = node->string_or("output", stem_default);
        node->require_all_used();
        const auto rep = lower_envelope_check(cfg);
        std::ostringstream csv;
        csv << "generator,N,D2,err,ratio\n";
        for (const auto& r : rep.rows) {
          csv << r.generator << "," << r.N << "," << fmt(r.D2) << "," << fmt(r.err) << "," << fmt(r.ratio) << "\n";
        }
        out.emit(csv.str(), (dir / (stem + ".csv")).string());
        Json trends = Json::array();
        for (const auto& t : rep.trends) trends.push_back({{"generator", t.generator}, {"slope", t.slope}, {"points", t.points}});
        Json j;
        j["report"] = "envelope";
        j["body"] = to_string(cfg.body);
        j["lambda"] = {cfg.range.lo, cfg.range.hi};
        j["engine"] = engine_json(cfg.engine);
        j["seed"] = seed;
        j["exponent"] = rep.exponent;
        j["rows"] = rows_json(rep.rows);
        j["trends"] = trends;
        Json envelope = Json::array();
        for (const auto& e : rep.envelope) {
          envelope.push_back({{"j", e.j}, {"N", e.N}, {"ratio", e.ratio}, {"generator", e.generator}});
        }
        j["envelope"] = envelope;
        j["envelope_trend"] = rep.envelope_trend;
        j["inf_ratio"] = rep.inf_ratio;
        j["argmin_N"] = rep.argmin_N;
        j["argmin_generator"] = rep.argmin_generator;
        j["min_trend"] = rep.min_trend;
        j["trend_floor"] = cfg.trend_floor;
        j["pass"] = rep.pass;
        out.emit(j.dump(2) + "\n", (dir / (stem + ".json")).string());
        pass = rep.pass;
      } else {
        const auto s = node->number("sigma");
        if (!s) throw ConfigError("budget: missing 'sigma'");
        const double M = node->number_or("M", 4.0);
        const std::vector<std::size_t> sizes = sizes_from(*node);
        const double ceiling = node->number_or("ceiling", kTestCeiling);
        const std::string stem = node->string_or("output", stem_default);
        node->require_all_used();
        const double ex = grid_exponent(*s);
        std::ostringstream csv;
        csv << "j,K,L,S1,S2,S3,S1_scaled,S2_scaled,S3_scaled\n";
        Json rows = Json::array();
        double worst = 0.0;
        for (std::size_t j : sizes) {
          const auto g = grid_for_sigma(j, *s);
          const auto rep = budget_partition(*s, g.K, g.L, M * static_cast<double>(std::max(g.K, g.L)));
          const double scale = std::pow(static_cast<double>(j), ex);
          worst = std::max({worst, rep.S1 / scale, rep.S2 / scale, rep.S3 / scale});
          csv << j << "," << g.K << "," << g.L << "," << fmt(rep.S1) << "," << fmt(rep.S2) << "," << fmt(rep.S3)
              << "," << fmt(rep.S1 / scale) << "," << fmt(rep.S2 / scale) << "," << fmt(rep.S3 / scale) << "\n";
          rows.push_back({{"j", j}, {"K", g.K}, {"L", g.L}, {"S1", rep.S1}, {"S2", rep.S2}, {"S3", rep.S3},
                          {"S1_over_L", rep.S1_over_L()}, {"S2_over_L", rep.S2_over_L()},
                          {"S3_over_L", rep.S3_over_L()}, {"terms", {rep.n1, rep.n2, rep.n3}}});
        }
        out.emit(csv.str(), (dir / (stem + ".csv")).string());
        pass = worst <= ceiling;
        Json j;
        j["report"] = "budget";
        j["sigma"] = *s;
        j["M"] = M;
        j["exponent"] = ex;
        j["rows"] = rows;
        j["max_scaled"] = worst;
        j["ceiling"] = ceiling;
        j["pass"] = pass;
        out.emit(j.dump(2) + "\n", (dir / (stem + ".json")).string());
      }
      out.finish();
      return pass ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << app.help();
  return 2;
}
