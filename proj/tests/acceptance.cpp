// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "convalg/verify.hpp"

using namespace convalg;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
};

void absorb(Outcome& o, const SuiteResult& r, const std::string& label) {
  if (!r.pass) {
    o.pass = false;
    for (const auto& c : r.report["checks"])
      if (!c["pass"].get<bool>()) o.note += (o.note.empty() ? "" : "; ") + label + c["name"].get<std::string>();
  }
}

SuiteConfig config(int n, int d, int c = 1, Complex tau = {0.0, 1.0}) {
  SuiteConfig cfg;
  cfg.n = n, cfg.d = d, cfg.c = c, cfg.tau = tau;
  cfg.n_set = cfg.d_set = cfg.c_set = cfg.tau_set = true;
  return cfg;
}

Outcome suite(const std::string& name, const SuiteConfig& cfg, const std::string& label = "") {
  Outcome o;
  absorb(o, run_suite(name, cfg), label);
  return o;
}

}  // namespace

int main() {
  const Complex tau_i{0.0, 1.0}, tau_b{0.3, 1.1};
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence of compose",
       [] {
         Outcome o;
         const auto t0 = std::chrono::steady_clock::now();
         absorb(o, run_suite("oracle", SuiteConfig{}), "");
         const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
         if (secs >= 60) o.pass = false, o.note += " runtime " + std::to_string(secs) + " s";
         return o;
       }},
      {"diagonal shortcut", [] { return suite("shortcut", SuiteConfig{}); }},
      {"leading-term law", [] { return suite("leading-term", SuiteConfig{}); }},
      {"Lie homomorphism and tensor action",
       [] {
         Outcome o;
         for (int n = 1; n <= 3; ++n)
           for (int d = 0; d <= 3; ++d)
             absorb(o, run_suite("tau", config(n, d)), "n=" + std::to_string(n) + " d=" + std::to_string(d) + ": ");
         return o;
       }},
      {"generation with zero residual", [] { return suite("express", config(2, 3)); }},
      {"Bruhat order implies corner-sum order", [] { return suite("bruhat", config(2, 4)); }},
      {"orbit classification over F_2", [] { return suite("orbits", config(3, 3)); }},
      {"Heisenberg identities", [] { return suite("heisenberg", config(6, 0)); }},
      {"w_alpha calibration",
       [] {
         SuiteConfig cfg;  // sweeps n in {2, 3} and both lattices
         return suite("w", cfg);
       }},
      {"classical Yang-Baxter equation",
       [tau_i, tau_b] {
         Outcome o;
         const auto t0 = std::chrono::steady_clock::now();
         for (auto [n, c] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}})
           for (Complex tau : {tau_i, tau_b})
             absorb(o, run_suite("cybe", config(n, 0, c, tau)), "n=" + std::to_string(n) + " c=" + std::to_string(c) + ": ");
         const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
         if (secs >= 30) o.pass = false, o.note += " runtime " + std::to_string(secs) + " s";
         return o;
       }},
      {"residue structure", [] { return suite("residue", SuiteConfig{}); }},
      {"E_n equivariance and automorphy",
       [tau_i, tau_b] {
         Outcome o;
         for (Complex tau : {tau_i, tau_b}) {
           absorb(o, run_suite("en", config(2, 1, 1, tau)), "");
           absorb(o, run_suite("automorphy", config(2, 1, 1, tau)), "");
         }
         return o;
       }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %2zu %s%s%s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.note.empty() ? "" : " -- ",
                o.note.c_str());
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed ? 1 : 0;
}
