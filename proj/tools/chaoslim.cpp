#include <algorithm>
#include <cmath>
#include <optional>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaoslim/errors.hpp"
#include "chaoslim/harness.hpp"
#include "chaoslim/ising.hpp"
#include "chaoslim/pinning.hpp"
#include "chaoslim/polymer.hpp"
#include "chaoslim/rng.hpp"
#include "chaoslim/tilting.hpp"

using namespace chaoslim;

namespace {

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw InputError("cannot write " + path);
  file.precision(17);
  return file;
}

WalkLaw walk_for(double alpha, double sigma2, double gamma) {
  if (alpha < 2.0) return WalkLaw::heavy_tail(alpha, gamma, 4096);
  if (sigma2 == 1.0) return WalkLaw::simple();
  if (sigma2 > 0.0 && sigma2 < 1.0) return WalkLaw::from_pmf({-1, {sigma2 / 2, 1 - sigma2, sigma2 / 2}});
  if (sigma2 > 1.0 && sigma2 <= 4.0) {
    const double a = (sigma2 - 1.0) / 6.0;
    const double b = 0.5 - a;
    return WalkLaw::from_pmf({-2, {a, b, 0.0, b, a}});
  }
  throw InputError("sigma2 must lie in (0, 4]");
}

DiscreteLaw read_atoms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::vector<Atom> atoms;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double v = 0.0;
    double p = 0.0;
    if (!(ss >> v >> p)) continue;  // header
    atoms.push_back({v, p});
  }
  if (atoms.empty()) throw InputError("no atoms in " + path);
  return DiscreteLaw(std::move(atoms));
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslim: polynomial and Wiener chaos for disordered systems"};
  app.require_subcommand(1);

  // pinning
  auto* pin = app.add_subcommand("pinning", "sample pinning partition functions");
  double pin_alpha = 0.0;
  bool pin_finite = false;
  std::string pin_jumps = "0.5,0.5";
  std::size_t pin_n = 1000;
  double pin_bh = 1.0;
  double pin_hh = 0.0;
  std::size_t pin_samples = 1000;
  std::uint64_t pin_seed = 1;
  std::string pin_mode = "conditioned";
  std::string pin_disorder = "gaussian";
  std::string pin_out;
  auto* a_opt = pin->add_option("--alpha", pin_alpha, "tail exponent in (1/2, 1)");
  auto* f_opt = pin->add_flag("--finite-mean", pin_finite, "finite-mean renewal (see --jumps)");
  a_opt->excludes(f_opt);
  pin->add_option("--jumps", pin_jumps, "P(tau=1),P(tau=2),... for --finite-mean");
  pin->add_option("--N", pin_n)->required();
  pin->add_option("--beta-hat", pin_bh);
  pin->add_option("--h-hat", pin_hh);
  pin->add_option("--samples", pin_samples);
  pin->add_option("--seed", pin_seed);
  pin->add_option("--mode", pin_mode)->check(CLI::IsMember({"free", "conditioned"}));
  pin->add_option("--disorder", pin_disorder)->check(CLI::IsMember({"gaussian", "rademacher"}));
  pin->add_option("--out", pin_out);

  // polymer
  auto* poly = app.add_subcommand("polymer", "sample directed polymer partition functions");
  double poly_alpha = 2.0;
  double poly_sigma2 = 1.0;
  double poly_gamma = 0.0;
  std::size_t poly_n = 100;
  double poly_bh = 0.5;
  std::int64_t poly_x = 0;
  std::string poly_mode = "free";
  std::size_t poly_samples = 100;
  std::uint64_t poly_seed = 1;
  std::string poly_disorder = "gaussian";
  std::string poly_out;
  poly->add_option("--alpha", poly_alpha);
  poly->add_option("--sigma2", poly_sigma2);
  poly->add_option("--gamma", poly_gamma);
  poly->add_option("--N", poly_n)->required();
  poly->add_option("--beta-hat", poly_bh);
  poly->add_option("--x", poly_x, "endpoint for point2point/conditioned");
  poly->add_option("--mode", poly_mode)->check(CLI::IsMember({"free", "point2point", "conditioned"}));
  poly->add_option("--samples", poly_samples);
  poly->add_option("--seed", poly_seed);
  poly->add_option("--disorder", poly_disorder)->check(CLI::IsMember({"gaussian", "rademacher"}));
  poly->add_option("--out", poly_out);

  // ising
  auto* ising = app.add_subcommand("ising", "sample random-field Ising partition functions");
  int is_w = 3;
  int is_h = 3;
  double is_delta = 0.25;
  double is_lh = 1.0;
  double is_hh = 0.0;
  std::size_t is_samples = 1000;
  std::uint64_t is_seed = 1;
  std::string is_out;
  ising->add_option("--width", is_w);
  ising->add_option("--height", is_h);
  ising->add_option("--delta", is_delta);
  ising->add_option("--lambda-hat-const", is_lh);
  ising->add_option("--h-hat-const", is_hh);
  ising->add_option("--samples", is_samples);
  ising->add_option("--seed", is_seed);
  ising->add_option("--out", is_out);

  // tilt
  auto* tilt = app.add_subcommand("tilt", "exponential tilting of a discrete law");
  std::string tilt_atoms;
  std::string tilt_interval = "two-sided";
  std::string tilt_p = "2,0.5,-1";
  std::string tilt_out;
  tilt->add_option("--atoms", tilt_atoms, "CSV value,prob")->required();
  tilt->add_option("--interval", tilt_interval)->check(CLI::IsMember({"two-sided", "one-sided"}));
  tilt->add_option("--p", tilt_p);
  tilt->add_option("--out", tilt_out);

  // run
  auto* run = app.add_subcommand("run", "run a convergence study from a JSON config");
  std::string run_config;
  run->add_option("--config", run_config)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (pin->parsed()) {
      nlohmann::json params;
      if (*a_opt) {
        params["alpha"] = pin_alpha;
      } else {
        params["jumps"] = parse_list(pin_jumps);
      }
      const auto law = renewal_from_params(params, pin_n + 1);
      const auto disorder = DisorderLaw::from_name(pin_disorder);
      std::ofstream file;
      auto& out = open_out(pin_out, file);
      out << "seed,N,Z,logZ\n";
      for (const auto& s : sample_pinning(law, disorder, pin_n, pin_bh, pin_hh,
                                          pin_mode_from_name(pin_mode), pin_samples, pin_seed)) {
        out << s.seed << ',' << pin_n << ',' << s.z << ',' << std::log(s.z) << '\n';
      }
      return 0;
    }
    if (poly->parsed()) {
      const auto walk = walk_for(poly_alpha, poly_sigma2, poly_gamma);
      const auto mode = polymer_mode_from_name(poly_mode);
      const auto disorder = DisorderLaw::from_name(poly_disorder);
      std::optional<std::int64_t> y;
      if (mode != PolymerMode::free) y = poly_x;
      std::ofstream file;
      auto& out = open_out(poly_out, file);
      out << "seed,N,mode,x,Z,logZ\n";
      for (const auto& s :
           sample_polymer(walk, disorder, poly_n, poly_bh, mode, y, poly_samples, poly_seed)) {
        out << s.seed << ',' << poly_n << ',' << poly_mode << ',' << poly_x << ',' << s.z << ','
            << std::log(s.z) << '\n';
      }
      return 0;
    }
    if (ising->parsed()) {
      const auto sys = LatticeSpinSystem::rectangle(is_w, is_h, is_delta);
      const auto profiles = FieldProfiles::constant(is_lh, is_hh);
      const auto fields = scale_fields(profiles, sys);
      const double pre = normalization_prefactor(profiles, *sys.domain(), is_delta);
      const auto disorder = DisorderLaw::gaussian();
      std::ofstream file;
      auto& out = open_out(is_out, file);
      out << "seed,width,height,delta,Z,Z_normalized\n";
      for (std::size_t s = 0; s < is_samples; ++s) {
        const std::uint64_t key = derive_seed(is_seed, s);
        CounterRng rng(key);
        const double z = rfim_partition(sys, field_xi(fields, disorder.sample_n(sys.size(), rng)));
        out << key << ',' << is_w << ',' << is_h << ',' << is_delta << ',' << z << ',' << pre * z
            << '\n';
      }
      return 0;
    }
    if (tilt->parsed()) {
      const auto law = read_atoms(tilt_atoms);
      const auto interval =
          tilt_interval == "one-sided" ? TiltInterval::one_sided : TiltInterval::two_sided;
      const auto r = tilt_zero_mean(law, interval);
      const auto v = verify_tilt_bounds(r, law, parse_list(tilt_p));
      nlohmann::json j;
      j["A"] = r.A;
      j["epsilon"] = r.epsilon;
      j["lambda"] = r.lambda;
      j["log_norm"] = r.log_norm;
      j["interval"] = tilt_interval;
      j["tilted_mean"] = v.tilted_mean;
      j["tilted_second_moment"] = v.tilted_second_moment;
      j["density"] = nlohmann::json::array();
      for (std::size_t i = 0; i < r.atoms.size(); ++i) {
        j["density"].push_back({{"value", r.atoms[i].value}, {"f", r.density[i]}});
      }
      auto bound = [](const TiltBound& b) {
        return nlohmann::json{{"lhs", b.lhs}, {"rhs", b.rhs}, {"holds", b.holds}};
      };
      for (const auto& [p, b] : v.density_power) j["density_power"][std::to_string(p)] = bound(b);
      j["second_moment"] = bound(v.second_moment_bound);
      j["improved_second_moment"] = bound(v.improved_bound);
      j["sign_condition"] = v.sign_condition;
      j["lambda_bound"] = bound(v.lambda_bound);
      j["passed"] = v.all_hold();
      std::ofstream file;
      open_out(tilt_out, file) << j.dump(2) << '\n';
      return v.all_hold() ? 0 : 1;
    }
    if (run->parsed()) {
      std::ifstream in(run_config);
      if (!in) throw InputError("cannot read " + run_config);
      const auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(in));
      const auto rep = run_convergence_study(cfg);
      if (cfg.json_path.empty()) std::cout << rep.to_json().dump(2) << '\n';
      return rep.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "chaoslim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
