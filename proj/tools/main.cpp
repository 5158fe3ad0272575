#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "perturbmap/bench.hpp"
#include "perturbmap/concentration.hpp"
#include "perturbmap/errors.hpp"
#include "perturbmap/model_io.hpp"
#include "perturbmap/sampler.hpp"
#include "perturbmap/svg.hpp"

namespace {

using namespace perturbmap;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string labels_line(const DiscreteModel& model, const Configuration& x) {
  std::string line;
  for (int i = 0; i < model.num_variables(); ++i) {
    if (i > 0) line += ' ';
    line += format_number(model.label_value(i, x[i]));
  }
  return line;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs sampling via randomly perturbed maximization"};
  app.require_subcommand(1);

  // Deferred action so every subcommand shares one error-to-exit-code path.
  std::function<void()> action;

  // ---- logz ----------------------------------------------------------------
  auto* logz_cmd = app.add_subcommand("logz", "Exact log partition function");
  {
    auto model_path = std::make_shared<std::string>();
    auto cap = std::make_shared<std::uint64_t>(kDefaultEnumerationCap);
    auto seed = std::make_shared<std::uint64_t>(1);
    logz_cmd->add_option("model", *model_path, "Model JSON file")->required();
    logz_cmd->add_option("--cap", *cap, "Enumeration cap on |X|");
    logz_cmd->add_option("--seed", *seed, "Unused; accepted for uniformity");
    logz_cmd->callback([=, &action] {
      action = [=] {
        const DiscreteModel model = load_model_file(*model_path);
        std::cout << format_number(log_partition_exact(model, *cap)) << "\n";
      };
    });
  }

  // ---- map -----------------------------------------------------------------
  auto* map_cmd = app.add_subcommand("map", "Most probable configuration");
  {
    auto model_path = std::make_shared<std::string>();
    auto solver = std::make_shared<std::string>("brute");
    auto cap = std::make_shared<std::uint64_t>(kDefaultEnumerationCap);
    auto seed = std::make_shared<std::uint64_t>(1);
    map_cmd->add_option("model", *model_path, "Model JSON file")->required();
    map_cmd->add_option("--solver", *solver, "brute|mincut")
        ->check(CLI::IsMember({"brute", "mincut"}));
    map_cmd->add_option("--cap", *cap, "Enumeration cap on |X|");
    map_cmd->add_option("--seed", *seed, "Unused; accepted for uniformity");
    map_cmd->callback([=, &action] {
      action = [=] {
        const DiscreteModel model = load_model_file(*model_path);
        const MapResult result = solver_from_name(*solver) == SolverKind::kBruteForce
                                     ? map_bruteforce(model, nullptr, *cap)
                                     : map_mincut(model);
        std::cout << "value " << format_number(result.value) << "\n";
        std::cout << "argmax " << labels_line(model, result.argmax) << "\n";
      };
    });
  }

  // ---- sample-exact ----------------------------------------------------------
  auto* exact_cmd = app.add_subcommand("sample-exact", "Exact Gibbs samples");
  {
    auto model_path = std::make_shared<std::string>();
    auto count = std::make_shared<int>(1);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto cap = std::make_shared<std::uint64_t>(kDefaultEnumerationCap);
    exact_cmd->add_option("model", *model_path, "Model JSON file")->required();
    exact_cmd->add_option("--count", *count, "Number of samples")
        ->check(CLI::PositiveNumber);
    exact_cmd->add_option("--seed", *seed, "Random seed");
    exact_cmd->add_option("--cap", *cap, "Enumeration cap on |X|");
    exact_cmd->callback([=, &action] {
      action = [=] {
        const DiscreteModel model = load_model_file(*model_path);
        RngStream rng(*seed);
        for (int k = 0; k < *count; ++k) {
          std::cout << labels_line(model, sample_exact(model, rng, *cap)) << "\n";
        }
      };
    });
  }

  // ---- sample-seq ------------------------------------------------------------
  auto* seq_cmd = app.add_subcommand("sample-seq", "Sequential approximate Gibbs samples");
  {
    auto model_path = std::make_shared<std::string>();
    auto count = std::make_shared<int>(1);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto schedule = std::make_shared<std::vector<int>>();
    auto delta = std::make_shared<double>(0.05);
    auto solver = std::make_shared<std::string>("brute");
    auto max_restarts = std::make_shared<int>(1000);
    auto cap = std::make_shared<std::uint64_t>(kDefaultEnumerationCap);
    seq_cmd->add_option("model", *model_path, "Model JSON file")->required();
    seq_cmd->add_option("--count", *count, "Number of samples")
        ->check(CLI::PositiveNumber);
    seq_cmd->add_option("--seed", *seed, "Random seed");
    seq_cmd->add_option("--mj-schedule", *schedule,
                        "Per-step estimator sample counts (last repeats)")
        ->delimiter(',');
    seq_cmd->add_option("--delta", *delta, "Concentration confidence per estimate");
    seq_cmd->add_option("--solver", *solver, "brute|mincut")
        ->check(CLI::IsMember({"brute", "mincut"}));
    seq_cmd->add_option("--max-restarts", *max_restarts, "Restart budget per sample");
    seq_cmd->add_option("--cap", *cap, "Enumeration cap on |X|");
    seq_cmd->callback([=, &action] {
      action = [=] {
        const DiscreteModel model = load_model_file(*model_path);
        EstimatorConfig config;
        if (!schedule->empty()) config.m_schedule = *schedule;
        config.delta = *delta;
        config.solver = solver_from_name(*solver);
        config.enumeration_cap = *cap;
        RngStream rng(*seed);
        int exhausted = 0;
        int restarts = 0;
        std::uint64_t solver_calls = 0;
        for (int k = 0; k < *count; ++k) {
          const SamplerTrace trace = sample_sequential(model, config, rng, *max_restarts);
          restarts += trace.restart_count;
          solver_calls += trace.solver_calls;
          if (trace.sample.has_value()) {
            std::cout << labels_line(model, *trace.sample) << "\n";
          } else {
            ++exhausted;
            std::cout << "restart-budget-exhausted\n";
          }
        }
        std::cerr << "# samples=" << *count << " restarts=" << restarts
                  << " budget_exhausted=" << exhausted
                  << " solver_calls=" << solver_calls << "\n";
      };
    });
  }

  // ---- gen-spinglass ---------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("gen-spinglass", "Generate a grid spin model");
  {
    auto cfg = std::make_shared<SpinGlassConfig>();
    auto out_path = std::make_shared<std::string>();
    gen_cmd->add_option("--rows", cfg->rows, "Grid rows")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--cols", cfg->cols, "Grid columns")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--coupling", cfg->coupling, "Coupling upper bound c");
    gen_cmd->add_option("--seed", cfg->seed, "Random seed");
    gen_cmd->add_option("-o,--out", *out_path, "Output model file")->required();
    gen_cmd->callback([=, &action] {
      action = [=] {
        RngStream rng(cfg->seed);
        save_model_file(generate_spin_glass(*cfg, rng), *out_path);
      };
    });
  }

  // ---- experiment ------------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "Benchmark experiments");
  {
    auto kind = std::make_shared<std::string>();
    auto config_path = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>(".");
    auto seed = std::make_shared<std::uint64_t>(0);
    auto* seed_opt =
        exp_cmd->add_option("--seed", *seed, "Override the plan's seed");
    exp_cmd->add_option("kind", *kind, "error-vs-coupling|deviation-histogram")
        ->required()
        ->check(CLI::IsMember({"error-vs-coupling", "deviation-histogram"}));
    exp_cmd->add_option("--config", *config_path, "Experiment plan JSON")->required();
    exp_cmd->add_option("-o,--out-dir", *out_dir, "Directory for CSV output");
    exp_cmd->callback([=, &action] {
      const bool seed_given = seed_opt->count() > 0;
      action = [=] {
        ExperimentPlan plan = load_plan_file(*config_path);
        if (seed_given) plan.seed = *seed;
        const bool line = *kind == "error-vs-coupling";
        const std::string csv =
            line ? run_error_vs_coupling(plan) : run_deviation_histogram(plan);
        const std::filesystem::path path =
            std::filesystem::path(*out_dir) /
            (line ? "error_vs_coupling.csv" : "deviation_histogram.csv");
        write_text_file(path.string(), csv);
        std::cout << path.string() << "\n";
      };
    });
  }

  // ---- check-inequality --------------------------------------------------------
  auto* check_cmd = app.add_subcommand("check-inequality", "Functional inequality checks");
  {
    auto kind = std::make_shared<std::string>();
    auto density = std::make_shared<std::string>("gumbel");
    auto function = std::make_shared<std::string>("all");
    auto eta = std::make_shared<double>(0.5);
    auto lambda = std::make_shared<double>(0.1);
    auto rho = std::make_shared<double>(0.1);
    auto seed = std::make_shared<std::uint64_t>(1);
    check_cmd->add_option("kind", *kind, "poincare|gumbel-poincare|log-sobolev")
        ->required()
        ->check(CLI::IsMember({"poincare", "gumbel-poincare", "log-sobolev"}));
    check_cmd->add_option("--density", *density, "gumbel|gaussian|laplace (poincare only)");
    check_cmd->add_option("--function", *function, "Test function name or 'all'");
    check_cmd->add_option("--eta", *eta, "Weight parameter in [0,1) (poincare only)");
    check_cmd->add_option("--lambda", *lambda, "Exponent scale (log-sobolev only)");
    check_cmd->add_option("--rho", *rho, "Lipschitz budget in (0,1) (log-sobolev only)");
    check_cmd->add_option("--seed", *seed, "Unused; accepted for uniformity");
    check_cmd->callback([=, &action] {
      action = [=] {
        std::vector<ScalarFunctionSpec> functions;
        if (*function == "all") {
          functions = test_function_suite();
        } else {
          functions.push_back(test_function(*function));
        }
        nlohmann::json reports = nlohmann::json::array();
        for (const auto& fn : functions) {
          InequalityReport report;
          if (*kind == "poincare") {
            report = check_poincare(density_from_name(*density), fn, *eta);
          } else if (*kind == "gumbel-poincare") {
            report = check_gumbel_poincare(fn);
          } else {
            report = check_modified_log_sobolev(fn, *lambda, *rho);
          }
          nlohmann::json doc = report_to_json(report);
          doc["function"] = fn.name;
          if (*kind == "poincare") doc["density"] = *density;
          reports.push_back(std::move(doc));
        }
        std::cout << reports.dump(2) << "\n";
      };
    });
  }

  // ---- plot ---------------------------------------------------------------
  auto* plot_cmd = app.add_subcommand("plot", "Render a benchmark CSV as SVG");
  {
    auto in_path = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(1);
    plot_cmd->add_option("--in", *in_path, "Input CSV file")->required();
    plot_cmd->add_option("--kind", *kind, "line|histogram")
        ->required()
        ->check(CLI::IsMember({"line", "histogram"}));
    plot_cmd->add_option("-o,--out", *out_path, "Output SVG file")->required();
    plot_cmd->add_option("--seed", *seed, "Unused; accepted for uniformity");
    plot_cmd->callback([=, &action] {
      action = [=] {
        const std::string csv = read_text_file(*in_path);
        write_text_file(*out_path, render_plot_svg(csv, plot_kind_from_name(*kind)));
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help prints with code 0; bad usage is invalid input
  }

  try {
    action();
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
