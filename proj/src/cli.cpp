#include "l1hr/cli.hpp"

#include "l1hr/error.hpp"
#include "l1hr/harmonic.hpp"
#include "l1hr/simkit.hpp"
#include "l1hr/tensor_io.hpp"
#include "l1hr/tucker.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

namespace l1hr {
namespace {

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string complexText(Complex v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gj", v.real(), v.imag());
  return buf;
}

template <typename T>
std::string joined(const std::vector<T>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ' ';
    if constexpr (std::is_same_v<T, Complex>) {
      s += complexText(values[i]);
    } else {
      s += std::to_string(values[i]);
    }
  }
  return s;
}

// Scenario flags shared by simulate, sweep and crlb.
struct ScenarioFlags {
  HrScenario scenario;
  int hankelRows = 0;  // 0: derived from N
  int hankelCols = 0;

  ScenarioFlags() {
    scenario.outlierFraction = 0.05;
    scenario.snrDb = 20.0;
  }

  void attach(CLI::App& app, bool withSnr) {
    app.add_option("--grid-size", scenario.gridSize, "Grid size K (K-1 subcarriers)")
        ->capture_default_str();
    app.add_option("--active", scenario.activeCount, "Active subcarriers Ka")
        ->capture_default_str();
    app.add_option("--symbols", scenario.symbolCount, "Symbols per frame Q")
        ->capture_default_str();
    app.add_option("--samples", scenario.sampleCount, "Samples per symbol N")
        ->capture_default_str();
    app.add_option("--hankel-rows", hankelRows, "Hankel rows I1 (default floor(N/2)+1)");
    app.add_option("--hankel-cols", hankelCols, "Hankel columns I2 (default N+1-I1)");
    if (withSnr) {
      app.add_option("--snr-db", scenario.snrDb, "SNR in dB (inf for noiseless)")
          ->capture_default_str();
    }
    app.add_option("--outlier-frac", scenario.outlierFraction, "Fraction of samples with outliers")
        ->capture_default_str();
    app.add_option("--outlier-var", scenario.outlierVariance, "Outlier variance")
        ->capture_default_str();
    app.add_option("--delta-t", scenario.deltaT, "Sampling interval")->capture_default_str();
  }

  HrScenario resolve() const {
    HrScenario s = scenario;
    s.hankelRows = hankelRows > 0 ? hankelRows
                                  : (hankelCols > 0 ? s.sampleCount + 1 - hankelCols
                                                    : s.sampleCount / 2 + 1);
    s.hankelCols = hankelCols > 0 ? hankelCols : s.sampleCount + 1 - s.hankelRows;
    s.validate();
    return s;
  }
};

struct SolverFlags {
  PipelineOptions options;

  void attach(CLI::App& app) {
    app.add_option("--delta", options.delta, "Inner L1-PCA tolerance")->capture_default_str();
    app.add_option("--max-inner", options.maxInnerIters, "Inner iteration cap")
        ->capture_default_str();
    app.add_option("--outer-tol", options.outerTol, "Outer relative tolerance")
        ->capture_default_str();
    app.add_option("--max-outer", options.maxOuterIters, "Outer sweep cap")
        ->capture_default_str();
  }
};

const std::vector<std::string> kMethodNames{"hosvd", "hooi", "l1totd", "l1tooi"};
const std::vector<std::string> kDetectorNames{"esprit", "scsm"};

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust harmonic retrieval with L1-norm Tucker decompositions", "l1hr"};
  app.require_subcommand(1);
  std::function<int()> action;

  // simulate
  ScenarioFlags simScenario;
  SolverFlags simSolver;
  std::string simMethod = "l1tooi";
  std::string simDetector = "scsm";
  std::uint64_t simSeed = 0;
  bool simFuse = false;
  auto* simulate = app.add_subcommand("simulate", "Run one pipeline and print the recovery");
  simScenario.attach(*simulate, true);
  simSolver.attach(*simulate);
  simulate->add_option("--seed", simSeed, "Random seed")->capture_default_str();
  simulate->add_option("--method", simMethod, "Decomposition")
      ->check(CLI::IsMember(kMethodNames))
      ->capture_default_str();
  simulate->add_option("--detector", simDetector, "Subcarrier detector")
      ->check(CLI::IsMember(kDetectorNames))
      ->capture_default_str();
  simulate->add_flag("--fuse-mode-two", simFuse, "Average mode-1 and mode-2 SCSM scores");
  simulate->callback([&] {
    action = [&] {
      HrScenario scenario = simScenario.resolve();
      scenario.seed = simSeed;
      PipelineOptions options = simSolver.options;
      options.fuseModeTwo = simFuse;
      const Synthesis data = synthesize(scenario);
      const auto method = *parseDecomposition(simMethod);
      const auto detector = *parseDetector(simDetector);
      const TuckerFactors factors = factorize(data.samples, scenario, method, options);
      const RecoveryResult result =
          detect(data.samples, factors, scenario, method, detector, options);
      const RmseValues errors = rmse(data.truth, result);
      out << "scenario K=" << scenario.gridSize << " Ka=" << scenario.activeCount
          << " Q=" << scenario.symbolCount << " N=" << scenario.sampleCount
          << " I1=" << scenario.hankelRows << " I2=" << scenario.hankelCols
          << " snr_db=" << real(scenario.snrDb) << " outlier_frac=" << real(scenario.outlierFraction)
          << " outlier_var=" << real(scenario.outlierVariance) << " seed=" << scenario.seed << '\n';
      out << "method=" << toString(method) << " detector=" << toString(detector)
          << " sweeps=" << factors.sweeps << '\n';
      out << "true_indices=" << joined(data.truth.activeIndices) << '\n';
      out << "estimated_indices=" << joined(result.estimatedIndices) << '\n';
      out << "raw_poles=" << joined(result.rawPoles) << '\n';
      out << "rmse_z_hard=" << real(errors.zHard) << " rmse_z_raw=" << real(errors.zRaw)
          << " rmse_c=" << real(errors.c) << '\n';
      return 0;
    };
  });

  // sweep
  ScenarioFlags sweepScenario;
  SolverFlags sweepSolver;
  SweepConfig sweepConfig;
  std::vector<std::string> sweepMethods = kMethodNames;
  std::vector<std::string> sweepDetectors = kDetectorNames;
  std::string sweepOutput;
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo SNR sweep written as CSV");
  sweepScenario.attach(*sweep, false);
  sweepSolver.attach(*sweep);
  sweep->add_option("--snr-grid", sweepConfig.snrGridDb, "Comma-separated SNR grid in dB")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--trials", sweepConfig.trials, "Trials per grid point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--methods", sweepMethods, "Comma-separated decompositions")
      ->delimiter(',')
      ->check(CLI::IsMember(kMethodNames))
      ->capture_default_str();
  sweep->add_option("--detectors", sweepDetectors, "Comma-separated detectors")
      ->delimiter(',')
      ->check(CLI::IsMember(kDetectorNames))
      ->capture_default_str();
  sweep->add_option("--master-seed", sweepConfig.masterSeed, "Master seed")
      ->capture_default_str();
  sweep->add_option("--threads", sweepConfig.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--output,-o", sweepOutput,
                    std::string("CSV path (default sweep.csv in $") + kOutputDirEnv + " or .)");
  sweep->callback([&] {
    action = [&] {
      sweepConfig.scenario = sweepScenario.resolve();
      sweepConfig.options = sweepSolver.options;
      sweepConfig.methods.clear();
      for (const auto& m : sweepMethods) sweepConfig.methods.push_back(*parseDecomposition(m));
      sweepConfig.detectors.clear();
      for (const auto& d : sweepDetectors) sweepConfig.detectors.push_back(*parseDetector(d));
      if (sweepOutput.empty()) {
        const char* dir = std::getenv(kOutputDirEnv);
        sweepOutput = (std::filesystem::path(dir && *dir ? dir : ".") / "sweep.csv").string();
      }
      sweepConfig.outputPath = sweepOutput;
      const RmseReport report = runSweep(sweepConfig);
      int failures = 0;
      for (const auto& row : report.rows) failures += row.failures;
      out << "wrote " << report.rows.size() << " rows to " << sweepOutput
          << " (failed trials: " << failures << ")\n";
      return 0;
    };
  });

  // crlb
  ScenarioFlags crlbScenario;
  auto* bound = app.add_subcommand("crlb", "Print the Cramer-Rao bounds for a scenario");
  crlbScenario.attach(*bound, true);
  bound->callback([&] {
    action = [&] {
      const HrScenario scenario = crlbScenario.resolve();
      const CrlbValues values = crlb(scenario);
      out << "sigma2=" << real(scenario.noiseVariance()) << '\n';
      out << "crlb_c=" << real(values.symbol) << '\n';
      out << "crlb_z=" << real(values.pole) << '\n';
      return 0;
    };
  });

  // decompose
  std::string decInput;
  std::string decOutput;
  std::string decMethod = "l1tooi";
  std::vector<long long> decRanks;
  SolverFlags decSolver;
  decSolver.options.delta = TuckerConfig{}.delta;
  auto* decompose = app.add_subcommand("decompose", "Decompose a tensor read from a text file");
  decompose->add_option("--input,-i", decInput, "Tensor file ('-' for stdin)")->required();
  decompose->add_option("--output,-o", decOutput, "Factor file (default stdout)");
  decompose->add_option("--method", decMethod, "Decomposition")
      ->check(CLI::IsMember(kMethodNames))
      ->capture_default_str();
  decompose->add_option("--ranks", decRanks, "Ranks K1 K2 K3")->expected(3)->required();
  decSolver.attach(*decompose);
  decompose->callback([&] {
    action = [&] {
      ComplexTensor3 tensor;
      if (decInput == "-") {
        tensor = readTensorText(std::cin);
      } else {
        std::ifstream file(decInput);
        if (!file) throw std::runtime_error("cannot open " + decInput);
        tensor = readTensorText(file);
      }
      TuckerConfig config;
      config.ranks = {decRanks[0], decRanks[1], decRanks[2]};
      config.delta = decSolver.options.delta;
      config.maxInnerIters = decSolver.options.maxInnerIters;
      config.outerTol = decSolver.options.outerTol;
      config.maxOuterIters = decSolver.options.maxOuterIters;
      TuckerFactors factors;
      switch (*parseDecomposition(decMethod)) {
        case Decomposition::Hosvd: factors = hosvd(tensor, config.ranks); break;
        case Decomposition::Hooi: factors = hooi(tensor, config); break;
        case Decomposition::L1Totd: factors = l1totd(tensor, config); break;
        case Decomposition::L1Tooi: factors = l1tooi(tensor, config); break;
      }
      if (decOutput.empty()) {
        writeFactorsText(out, factors);
      } else {
        std::ofstream file(decOutput);
        if (!file) throw std::runtime_error("cannot open " + decOutput + " for writing");
        writeFactorsText(file, factors);
        out << "method=" << decMethod << " l1_objective=" << real(l1TuckerObjective(tensor, factors.factors))
            << " frob_objective=" << real(frobTuckerObjective(tensor, factors.factors)) << '\n';
      }
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    return action ? action() : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace l1hr
