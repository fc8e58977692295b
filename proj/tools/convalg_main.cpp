// convalg command line: schur, compose, verify.
// Exit codes: 0 pass, 1 check failure, 2 parse error, 3 input inconsistency or bounds, 4 usage.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "convalg/serialize.hpp"
#include "convalg/verify.hpp"

using namespace convalg;

namespace {

enum Exit { kPass = 0, kFail = 1, kParse = 2, kInconsistent = 3, kUsage = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return kPass;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kUsage;
  }
  out << text;
  return kPass;
}

Complex parse_tau(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--tau", "expected re,im");
  try {
    std::size_t p1 = 0, p2 = 0;
    const std::string re = s.substr(0, comma), im = s.substr(comma + 1);
    const double a = std::stod(re, &p1), b = std::stod(im, &p2);
    if (p1 != re.size() || p2 != im.size()) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--tau", "expected re,im");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolution algebras: Schur tables, operator composition, verification suites"};
  app.require_subcommand(1);

  int schur_n = 2, schur_d = 2;
  std::string schur_out;
  auto* schur = app.add_subcommand("schur", "structure constants of the Schur algebra S(n, d)");
  schur->add_option("--n", schur_n, "matrix size (<= 3)")->required();
  schur->add_option("--d", schur_d, "degree (<= 4)")->required();
  schur->add_option("--out", schur_out, "write the table here instead of stdout");

  std::string file1, file2, compose_out;
  auto* comp = app.add_subcommand("compose", "compose two operator files (first argument applied first)");
  comp->add_option("file1", file1)->required();
  comp->add_option("file2", file2)->required();
  comp->add_option("--out", compose_out, "output path");

  SuiteConfig cfg;
  std::string suite, tau_text, in_path, verify_out;
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("suite", suite, "suite name or alias")->required();
  auto* on = ver->add_option("--n", cfg.n);
  auto* od = ver->add_option("--d", cfg.d);
  auto* oc = ver->add_option("--c", cfg.c);
  auto* ot = ver->add_option("--tau", tau_text, "lattice parameter as re,im");
  ver->add_option("--seed", cfg.seed);
  ver->add_option("--tol", cfg.tol)->check(CLI::PositiveNumber);
  ver->add_option("--trunc", cfg.trunc)->check(CLI::PositiveNumber);
  ver->add_option("--in", in_path, "JSON file with any of n, d, c, tau, seed, tol, trunc");
  ver->add_option("--out", verify_out, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*schur) {
      const auto r = schur_report(schur_n, schur_d);
      const int rc = emit(r.report.dump(2) + "\n", schur_out);
      return rc != kPass ? rc : (r.pass ? kPass : kFail);
    }
    if (*comp) {
      const auto op1 = parse_operator(read_file(file1));
      const auto op2 = parse_operator(read_file(file2));
      return emit(dump_operator(compose(op1, op2)), compose_out);
    }
    // verify
    if (!in_path.empty()) {
      Json j;
      try {
        j = Json::parse(read_file(in_path));
      } catch (const Json::parse_error& e) {
        throw ParseError(e.what());
      }
      if (!j.is_object()) throw ParseError("--in file must hold a JSON object");
      try {
        if (j.contains("n")) cfg.n = j["n"].get<int>(), cfg.n_set = true;
        if (j.contains("d")) cfg.d = j["d"].get<int>(), cfg.d_set = true;
        if (j.contains("c")) cfg.c = j["c"].get<int>(), cfg.c_set = true;
        if (j.contains("tau")) cfg.tau = {j["tau"].at(0).get<double>(), j["tau"].at(1).get<double>()}, cfg.tau_set = true;
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
        if (j.contains("trunc")) cfg.trunc = j["trunc"].get<double>();
      } catch (const Json::exception& e) {
        throw ParseError(e.what());
      }
      if (!(cfg.tol > 0) || !(cfg.trunc > 0)) throw ParseError("tol and trunc must be positive");
    }
    // command line wins over --in
    if (on->count()) cfg.n_set = true;
    if (od->count()) cfg.d_set = true;
    if (oc->count()) cfg.c_set = true;
    if (ot->count()) {
      try {
        cfg.tau = parse_tau(tau_text);
      } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
      }
      cfg.tau_set = true;
    }
    if (cfg.tau.imag() <= 0) {
      std::cerr << "error: tau must lie in the upper half plane\n";
      return kInconsistent;
    }
    if (!canonical_suite(suite)) {
      std::cerr << "error: unknown suite '" << suite << "'; known:";
      for (const auto& s : suite_names()) std::cerr << " " << s;
      std::cerr << "\n";
      return kUsage;
    }
    const auto r = run_suite(suite, cfg);
    const int rc = emit(r.report.dump(2) + "\n", verify_out);
    if (!r.pass) std::cerr << "verify " << *canonical_suite(suite) << ": FAIL\n";
    return rc != kPass ? rc : (r.pass ? kPass : kFail);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const GroundMismatch& e) {
    std::cerr << "ground mismatch: " << e.what() << "\n";
    return kInconsistent;
  } catch (const BoundExceeded& e) {
    std::cerr << "bounds exceeded: " << e.what() << "\n";
    return kInconsistent;
  } catch (const std::invalid_argument& e) {
    std::cerr << "inconsistent input: " << e.what() << "\n";
    return kInconsistent;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
