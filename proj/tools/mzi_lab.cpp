// mzi_lab: phase-sensitivity tables for the lossy Mach-Zehnder interferometer.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mzi/figures.hpp"
#include "mzi/records.hpp"
#include "mzi/validation.hpp"

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, mzi::Scheme> kSchemes{{"qfi", mzi::Scheme::QFI},
                                                   {"parity", mzi::Scheme::Parity},
                                                   {"single-hd", mzi::Scheme::SingleHD},
                                                   {"double-hd", mzi::Scheme::DoubleHD}};
const std::map<std::string, mzi::ResourceKind> kResources{
    {"csv", mzi::ResourceKind::CSV}, {"tmsv", mzi::ResourceKind::TMSV}, {"coherent", mzi::ResourceKind::Coherent}};
const std::map<std::string, mzi::LossKind> kLosses{{"symmetric", mzi::LossKind::Symmetric},
                                                  {"one-arm", mzi::LossKind::OneArm}};
const std::map<std::string, mzi::OutputFormat> kFormats{{"csv", mzi::OutputFormat::Csv},
                                                       {"json", mzi::OutputFormat::Json}};

struct Common {
  std::string format = "csv";
  std::string out;
  std::optional<double> fixed_mu;

  mzi::MuPolicy policy() const { return fixed_mu ? mzi::MuPolicy::fixed_at(*fixed_mu) : mzi::MuPolicy::optimize(); }
  mzi::OutputFormat output_format() const { return kFormats.at(format); }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "csv or json (JSON lines)")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", c.out, "write to FILE instead of stdout");
  cmd->add_option("--fixed-mu", c.fixed_mu, "fix the CSV squeezed fraction instead of optimizing it")
      ->check(CLI::Range(0.0, 1.0));
}

std::vector<std::string> keys(const auto& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

template <class Fn>
void emit(const Common& c, Fn&& write) {
  if (c.out.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw UsageError("cannot open " + c.out);
  write(file);
}

struct PointArgs {
  std::string scheme = "qfi";
  std::string resource = "csv";
  double nbar = 10.0;
  std::string loss = "symmetric";
  double rate = 0.0;
  Common common;
};

int run_point(const PointArgs& a) {
  const auto loss = mzi::LossModel::from_rate(kLosses.at(a.loss), a.rate);
  mzi::SweepRow row;
  row.scheme = kSchemes.at(a.scheme);
  row.resource = kResources.at(a.resource);
  row.nbar = a.nbar;
  row.loss_kind = kLosses.at(a.loss);
  row.loss_rate = a.rate;
  row.point = mzi::scheme_sensitivity(row.scheme, row.resource, a.nbar, loss, a.common.policy());
  const std::vector<mzi::OutputRecord> records{mzi::OutputRecord::from(row)};
  emit(a.common, [&](std::ostream& os) { mzi::write_records(os, records, a.common.output_format()); });
  return 0;
}

struct SweepArgs {
  std::vector<std::string> figures;
  std::vector<std::string> schemes{"qfi"};
  std::vector<std::string> resources{"csv", "tmsv", "coherent"};
  std::string variable = "loss";
  double lo = 0.0;
  double hi = 0.5;
  int points = 51;
  double nbar = 10.0;
  double rate = 0.2;
  std::string loss = "symmetric";
  unsigned threads = 0;
  Common common;
};

std::vector<mzi::SweepSpec> sweep_specs(const SweepArgs& a) {
  std::vector<mzi::SweepSpec> specs;
  if (!a.figures.empty()) {
    for (const auto& id : a.figures) {
      auto panel = mzi::figure_preset(id);
      for (auto& s : panel) {
        if (a.common.fixed_mu) s.mu_policy = a.common.policy();
        specs.push_back(s);
      }
    }
    return specs;
  }
  mzi::SweepSpec s;
  s.variable = a.variable == "loss" ? mzi::SweepVariable::LossRate : mzi::SweepVariable::MeanPhotonNumber;
  s.lo = a.lo;
  s.hi = a.hi;
  s.points = a.points;
  s.nbar = a.nbar;
  s.loss_rate = a.rate;
  s.loss_kind = kLosses.at(a.loss);
  s.schemes.clear();
  for (const auto& k : a.schemes) s.schemes.push_back(kSchemes.at(k));
  s.resources.clear();
  for (const auto& k : a.resources) s.resources.push_back(kResources.at(k));
  s.mu_policy = a.common.policy();
  specs.push_back(s);
  return specs;
}

int run_sweep(const SweepArgs& a) {
  std::vector<mzi::SweepSpec> specs;
  try {
    specs = sweep_specs(a);
    for (const auto& s : specs) s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<mzi::OutputRecord> records;
  for (const auto& s : specs)
    for (const auto& row : mzi::run_sweep(s, a.threads)) records.push_back(mzi::OutputRecord::from(row));
  emit(a.common, [&](std::ostream& os) { mzi::write_records(os, records, a.common.output_format()); });
  return 0;
}

struct ThresholdArgs {
  std::string scheme = "qfi";
  std::string resource = "csv";
  double nbar = 10.0;
  std::string loss = "symmetric";
  double tol = mzi::kThresholdTolerance;
  Common common;
};

int run_threshold(const ThresholdArgs& a) {
  const auto result = mzi::snl_threshold(kSchemes.at(a.scheme), kResources.at(a.resource), a.nbar, kLosses.at(a.loss),
                                         a.common.policy(), a.tol);
  const std::vector<mzi::ThresholdRecord> records{{a.scheme, a.resource, a.nbar, a.loss, result}};
  emit(a.common, [&](std::ostream& os) { mzi::write_records(os, records, a.common.output_format()); });
  return 0;
}

int run_validate() {
  int failures = 0;
  std::printf("%-40s %-16s %20s %20s %10s  %s\n", "case", "quantity", "gaussian", "fock", "deviation", "result");
  for (const auto& c : mzi::default_validation_cases()) {
    for (const auto& chk : mzi::fock_cross_checks(c)) {
      std::printf("%-40s %-16s %20.12g %20.12g %10.2e  %s\n", c.label.c_str(), chk.quantity.c_str(), chk.gaussian,
                  chk.oracle, chk.deviation(), chk.passed() ? "PASS" : "FAIL");
      if (!chk.passed()) ++failures;
    }
    std::fflush(stdout);
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase sensitivity of a lossy Mach-Zehnder interferometer"};
  app.require_subcommand(0, 1);
  bool validate_flag = false;
  app.add_flag("--validate", validate_flag, "run the Fock-space cross-check table");

  PointArgs point;
  auto* pc = app.add_subcommand("point", "one optimized evaluation");
  pc->add_option("--scheme", point.scheme)->check(CLI::IsMember(keys(kSchemes)));
  pc->add_option("--resource", point.resource)->check(CLI::IsMember(keys(kResources)));
  pc->add_option("--nbar", point.nbar)->check(CLI::PositiveNumber);
  pc->add_option("--loss", point.loss)->check(CLI::IsMember(keys(kLosses)));
  pc->add_option("--rate", point.rate, "loss rate 1 - eta")->check(CLI::Range(0.0, 1.0));
  add_common(pc, point.common);

  SweepArgs sweep;
  auto* sc = app.add_subcommand("sweep", "tables over loss rate or mean photon number");
  sc->add_option("--figure", sweep.figures, "figure preset(s)")->check(CLI::IsMember(mzi::figure_ids()));
  sc->add_option("--scheme", sweep.schemes)->check(CLI::IsMember(keys(kSchemes)));
  sc->add_option("--resource", sweep.resources)->check(CLI::IsMember(keys(kResources)));
  sc->add_option("--variable", sweep.variable)->check(CLI::IsMember({"loss", "nbar"}));
  sc->add_option("--lo", sweep.lo);
  sc->add_option("--hi", sweep.hi);
  sc->add_option("--points", sweep.points);
  sc->add_option("--nbar", sweep.nbar)->check(CLI::PositiveNumber);
  sc->add_option("--rate", sweep.rate)->check(CLI::Range(0.0, 1.0));
  sc->add_option("--loss", sweep.loss)->check(CLI::IsMember(keys(kLosses)));
  sc->add_option("--threads", sweep.threads, "worker threads (default: MZI_LAB_THREADS or all cores)");
  add_common(sc, sweep.common);

  ThresholdArgs thr;
  auto* tc = app.add_subcommand("threshold", "loss rate at which a scheme stops beating the shot-noise limit");
  tc->add_option("--scheme", thr.scheme)->check(CLI::IsMember(keys(kSchemes)));
  tc->add_option("--resource", thr.resource)->check(CLI::IsMember(keys(kResources)));
  tc->add_option("--nbar", thr.nbar)->check(CLI::PositiveNumber);
  tc->add_option("--loss", thr.loss)->check(CLI::IsMember(keys(kLosses)));
  tc->add_option("--tol", thr.tol)->check(CLI::PositiveNumber);
  add_common(tc, thr.common);

  auto* vc = app.add_subcommand("validate", "Fock-space cross-check table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate_flag || vc->parsed()) return run_validate();
    if (pc->parsed()) return run_point(point);
    if (sc->parsed()) return run_sweep(sweep);
    if (tc->parsed()) return run_threshold(thr);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}
