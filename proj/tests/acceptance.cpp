// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "lefschetz/cli.hpp"
#include "support.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace lefschetz;
using namespace lefschetz::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Gate {
 public:
  void run(int id, const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream time;
    time.precision(3);
    time << secs << " s, limit " << time_limit_s << " s";
    if (secs > time_limit_s) {
      o.pass = false;
      o.detail += "; runtime exceeded";
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << o.detail << " ("
              << time.str() << ")" << std::endl;
    failures_ += !o.pass;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::vector<MonodromyWord> fixture_words() {
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(data_path("words"))) {
    if (e.path().extension() == ".word") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<MonodromyWord> out;
  for (const auto& p : paths) {
    MonodromyWord w = load_word(p.string());
    if (is_identity_factorization(SymplecticSpace(w.genus), w)) out.push_back(std::move(w));
  }
  return out;
}

SignatureReport signature_of(const MonodromyWord& w) { return fibration_signature(SymplecticSpace(w.genus), w); }

struct GenusTwoRuns {
  std::vector<FlowResult> runs;
};

const GenusTwoRuns& genus_two_runs() {
  static const GenusTwoRuns cache = [] {
    const auto s = shared(load_trisurf(data_path("meshes/genus2.trisurf")));
    GenusTwoRuns r;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const ConformalState st{s, 0.3 * low_frequency_field(*s, seed), 0.0};
      FlowConfig cfg;
      cfg.t_max = 200;
      cfg.tol = 1e-8;
      r.runs.push_back(run_flow(st, TargetCurvature::uniform(st), cfg));
    }
    return r;
  }();
  return cache;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& command) {
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome gauss_bonnet() {
  std::mt19937_64 rng(20260101);
  double worst = 0;
  int states = 0;
  for (int g = 0; g <= 3; ++g) {
    const char* names[] = {"sphere", "torus", "genus2", "genus3"};
    const auto s = shared(load_trisurf(data_path(std::string("meshes/") + names[g] + ".trisurf")));
    for (int k = 0; k < 250; ++k, ++states) {
      const ConformalState st = random_valid_state(s, rng, 0.3);
      worst = std::max(worst, std::abs(total_curvature(st) - gauss_bonnet_target(*s)));
    }
  }
  return {worst <= 1e-9, "max |sum K - 2 pi chi| = " + fmt(worst) + " over " + std::to_string(states) + " states"};
}

Outcome flow_convergence() {
  const auto& runs = genus_two_runs().runs;
  int converged = 0, good_fits = 0;
  double worst_rate = -1e300, worst_r2 = 1, worst_dev = 0, latest = 0;
  for (const auto& r : runs) {
    const bool ok = r.trace.terminated == Termination::converged && r.trace.samples.back().sup_dev < 1e-8;
    converged += ok;
    good_fits += r.trace.fitted_rate < -0.01 && r.trace.fitted_r2 >= 0.99;
    worst_rate = std::max(worst_rate, r.trace.fitted_rate);
    worst_r2 = std::min(worst_r2, r.trace.fitted_r2);
    worst_dev = std::max(worst_dev, r.trace.samples.back().sup_dev);
    latest = std::max(latest, r.state.time);
  }
  const int n = static_cast<int>(runs.size());
  return {converged == n && good_fits == n,
          std::to_string(converged) + "/" + std::to_string(n) + " converged (final sup dev <= " + fmt(worst_dev) +
              ", latest t = " + fmt(latest) + "), slowest rate " + fmt(worst_rate) + ", worst r2 " + fmt(worst_r2)};
}

Outcome maximum_principle() {
  const auto& runs = genus_two_runs().runs;
  int monotone = 0, h_ok = 0;
  double worst_h = 0, worst_r2 = 1;
  for (const auto& r : runs) {
    const auto& s = r.trace.samples;
    bool mono = true;
    for (std::size_t k = 2; k < s.size(); ++k) {
      mono = mono && s[k].max_dev <= s[k - 1].max_dev && s[k].min_dev >= s[k - 1].min_dev;
    }
    monotone += mono;
    const auto [lo, hi] = trailing_window(r.trace);
    const DecayFit fit = fit_decay_rate(r.trace, TraceQuantity::hmax, lo, hi);
    h_ok += s.back().h_max < 1e-6 && fit.r2 >= 0.98;
    worst_h = std::max(worst_h, s.back().h_max);
    worst_r2 = std::min(worst_r2, fit.r2);
  }
  const int n = static_cast<int>(runs.size());
  return {monotone == n && h_ok == n, std::to_string(monotone) + "/" + std::to_string(n) +
                                          " runs monotone (the criterion-2 runs); final H_max <= " + fmt(worst_h) + ", worst H_max fit r2 " +
                                          fmt(worst_r2)};
}

Outcome uniform_family() {
  const auto s = shared(load_trisurf(data_path("meshes/genus2.trisurf")));
  const FiberFamily fam = run_family(make_family(s, BaseSample::loop(32), 0.2, 7), FlowConfig{}, thread_count_from_env());
  int converged = 0;
  for (const auto& t : fam.traces) converged += t.terminated == Termination::converged;
  const EnvelopeFit env = uniform_envelope(fam);
  const LoopContinuity lc = loop_continuity(fam);
  const bool pass = converged == 32 && env.rate < 0 && env.r2 >= 0.98 && env.bound_holds && lc.closed;
  return {pass, std::to_string(converged) + "/32 converged; C0 = " + fmt(env.c0) + ", rate " + fmt(env.rate) +
                    ", r2 " + fmt(env.r2) + ", worst dev/envelope " + fmt(env.worst_ratio) + " (<= 1.05), closed " +
                    (lc.closed ? "true" : "false")};
}

Outcome meyer_properties() {
  std::mt19937_64 rng(777);
  int defects = 0, conj_fail = 0, bound_fail = 0, identity_fail = 0;
  for (int g = 1; g <= 3; ++g) {
    const SymplecticSpace space(g);
    for (int k = 0; k < 500; ++k) {
      const IntMatrix a = random_symplectic(space, rng), b = random_symplectic(space, rng),
                      c = random_symplectic(space, rng);
      defects += cocycle_defect(space, a, b, c) != 0;
      conj_fail += !conjugation_invariance(space, a, b, c);
    }
  }
  std::uniform_int_distribution<int> genus(1, 3);
  for (int k = 0; k < 5000; ++k) {
    const SymplecticSpace space(genus(rng));
    const IntMatrix a = random_symplectic(space, rng), b = random_symplectic(space, rng);
    bound_fail += std::abs(meyer_tau(space, a, b)) > 2 * space.genus;
    if (k % 10 == 0) {
      identity_fail += meyer_tau(space, space.identity(), a) != 0 || meyer_tau(space, a, space.identity()) != 0;
    }
  }
  return {defects + conj_fail + bound_fail + identity_fail == 0,
          "cocycle defects " + std::to_string(defects) + "/1500, conjugation failures " + std::to_string(conj_fail) +
              "/1500, |tau| > 2g " + std::to_string(bound_fail) + "/5000, identity failures " +
              std::to_string(identity_fail) + "/500"};
}

Outcome calibration() {
  bool pass = true;
  std::ostringstream d;
  const SignatureReport e1 = signature_of(words::elliptic_surface(1));
  const SignatureReport e2 = signature_of(words::elliptic_surface(2));
  pass &= e1.sigma == -8 && e2.sigma == -16;
  d << "sigma(E1) = " << e1.sigma << ", sigma(E2) = " << e2.sigma << "; c1(E(n)) =";
  for (int n = 1; n <= 3; ++n) {
    const SignatureReport r = signature_of(words::elliptic_surface(n));
    pass &= r.c1_pairing == n;
    d << " " << to_display_string(r.c1_pairing);
  }
  int mirror_ok = 0, cancel_ok = 0;
  const auto words = fixture_words();
  for (const auto& w : words) {
    const int sigma = signature_of(w).sigma;
    mirror_ok += signature_of(mirror_word(w)).sigma == -sigma;
    cancel_ok += signature_of(concatenate(w, mirror_word(w))).sigma == 0;
  }
  const int n = static_cast<int>(words.size());
  pass &= mirror_ok == n && cancel_ok == n;
  d << "; mirror negates " << mirror_ok << "/" << n << ", w.mirror(w) -> 0 " << cancel_ok << "/" << n;
  return {pass, d.str()};
}

Outcome factorization_invariance() {
  std::mt19937_64 rng(4242);
  int words_ok = 0, moves = 0, move_fail = 0, conj_fail = 0;
  const auto words = fixture_words();
  for (const auto& w : words) {
    const SignatureReport base = signature_of(w);
    bool ok = true;
    if (w.size() >= 2) {
      MonodromyWord cur = w;
      std::uniform_int_distribution<std::size_t> pos(0, w.size() - 2);
      std::bernoulli_distribution coin;
      for (int k = 0; k < 200; ++k, ++moves) {
        cur = hurwitz_move(cur, pos(rng), coin(rng) ? HurwitzDirection::right : HurwitzDirection::left);
        if (!(signature_of(cur) == base)) {
          ++move_fail;
          ok = false;
        }
      }
    }
    const SymplecticSpace space(w.genus);
    for (int k = 0; k < 100; ++k) {
      if (signature_of(conjugate_word(w, random_symplectic(space, rng))).sigma != base.sigma) {
        ++conj_fail;
        ok = false;
      }
    }
    words_ok += ok;
  }
  return {move_fail == 0 && conj_fail == 0,
          std::to_string(words_ok) + "/" + std::to_string(words.size()) + " words invariant; " +
              std::to_string(move_fail) + " report changes in " + std::to_string(moves) + " moves, " +
              std::to_string(conj_fail) + " sigma changes under conjugation"};
}

Outcome achiral_formula() {
  int ok = 0, smith = 0, smith_ok = 0;
  const auto words = fixture_words();
  for (const auto& w : words) {
    const SignatureReport r = signature_of(w);
    const PairingReport p = pairing_report(r);
    ok += Rational(r.sigma) == 4 * r.c1_pairing - (r.n_plus - r.n_minus) && p.sigma_hat_check;
    if (r.n_minus == 0) {
      ++smith;
      smith_ok += Rational(r.sigma) == 4 * r.c1_pairing - static_cast<int>(w.size()) && p.smith_check;
    }
  }
  const int n = static_cast<int>(words.size());
  return {ok == n && smith_ok == smith, "sigma = 4 c1 - (n+ - n-) on " + std::to_string(ok) + "/" + std::to_string(n) +
                                            " words; Smith form on " + std::to_string(smith_ok) + "/" +
                                            std::to_string(smith) + " all-chiral words"};
}

Outcome cli_round_trip() {
  const std::string cli = LEFSCHETZ_CLI_PATH;
  const fs::path root = fs::temp_directory_path() / "lefschetz_acceptance_cli";
  fs::remove_all(root);
  struct Job {
    std::string name, args;
  };
  const std::vector<Job> jobs = {
      {"flow", "flow " + data_path("meshes/genus2.trisurf") + " --config " + data_path("configs/flow_default.ini")},
      {"family", "family " + data_path("meshes/genus2.trisurf") + " --config " + data_path("configs/family_loop.ini")},
      {"signature", "signature " + data_path("words/genus2_separating_achiral.word")}};
  int identical = 0, files = 0;
  std::string mismatch;
  for (const auto& job : jobs) {
    // the second run uses a different worker count; outputs must not depend on it
    const fs::path a = root / (job.name + "_a"), b = root / (job.name + "_b");
    const int ca = shell("LEFSCHETZ_THREADS=1 " + cli + " " + job.args + " --out " + a.string() + " >/dev/null");
    const int cb = shell("LEFSCHETZ_THREADS=3 " + cli + " " + job.args + " --out " + b.string() + " >/dev/null");
    if (ca != 0 || cb != 0) {
      mismatch += " " + job.name + " exit " + std::to_string(ca) + "/" + std::to_string(cb);
      continue;
    }
    bool same = true;
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      const fs::path other = b / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
        same = false;
        mismatch += " " + job.name + "/" + e.path().filename().string();
      }
    }
    identical += same;
  }
  fs::remove_all(root);
  return {identical == static_cast<int>(jobs.size()),
          std::to_string(identical) + "/" + std::to_string(jobs.size()) + " commands byte-identical across " +
              std::to_string(files) + " files" + (mismatch.empty() ? "" : "; mismatches:" + mismatch)};
}

}  // namespace

int main() {
  Gate gate;
  gate.run(1, "Gauss-Bonnet", 10, gauss_bonnet);
  gate.run(2, "flow convergence", 300, flow_convergence);
  gate.run(3, "maximum-principle shadow", 300, maximum_principle);
  gate.run(4, "uniform family convergence", 900, uniform_family);
  gate.run(5, "Meyer cocycle properties", 120, meyer_properties);
  gate.run(6, "calibration and signature oracles", 600, calibration);
  gate.run(7, "factorization-equivalence invariance", 600, factorization_invariance);
  gate.run(8, "achiral formula consistency", 600, achiral_formula);
  gate.run(9, "CLI round-trip", 600, cli_round_trip);
  std::cout << (gate.failures() == 0 ? "ALL PASS" : std::to_string(gate.failures()) + " FAILED") << std::endl;
  return gate.failures() == 0 ? 0 : 1;
}
