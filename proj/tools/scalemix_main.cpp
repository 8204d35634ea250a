// Batch front door: parse a sectioned config, ingest CSV data, run the
// plain / expanded / exact samplers, and emit chains, certificates, and
// convergence diagnostics.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scalemix/scalemix.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Problem {
  scalemix::ParsedConfig config;
  scalemix::RegressionData data;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Problem load_problem(const std::string& config_path) {
  const scalemix::ParsedConfig config = scalemix::parse_config(slurp(config_path));
  const fs::path base = fs::path(config_path).parent_path();
  const auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q.string() : (base / q).string();
  };
  Eigen::MatrixXd y = scalemix::read_matrix_csv(resolve(config.y_path));
  Eigen::MatrixXd x = scalemix::read_matrix_csv(resolve(config.x_path));
  const double a =
      config.a ? *config.a : 0.5 * (static_cast<double>(y.cols()) + 1.0);
  return Problem{config, scalemix::RegressionData(std::move(y), std::move(x), a)};
}

fs::path ensure_out_dir(const std::string& out) {
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

unsigned worker_cap() {
  unsigned cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("SCALEMIX_THREADS")) {
    const long requested = std::strtol(env, nullptr, 10);
    if (requested >= 1 && static_cast<unsigned>(requested) < cap)
      cap = static_cast<unsigned>(requested);
  }
  return cap;
}

int cmd_run(const std::string& config_path, const std::string& algo_flag,
            std::optional<std::uint64_t> seed_flag, std::optional<int> chains_flag,
            const std::string& out) {
  const Problem problem = load_problem(config_path);
  if (!problem.config.has_run)
    throw std::runtime_error("run needs a [run] section in the config");

  scalemix::RunSettings settings = problem.config.run;
  if (!algo_flag.empty()) settings.algo = algo_flag;
  if (seed_flag) settings.seed = *seed_flag;
  if (chains_flag) settings.chains = *chains_flag;
  const fs::path dir = ensure_out_dir(out);

  scalemix::ChainConfig chain_config{problem.data, problem.config.h,
                                     static_cast<long>(settings.iterations)};
  if (settings.burn_in)
    chain_config.burn_in = static_cast<long>(*settings.burn_in);
  chain_config.thin = static_cast<long>(settings.thin);
  chain_config.record_latent = settings.record_latent;

  const int k = settings.chains;
  std::vector<json> meta(k);
  std::vector<std::string> failures(k);
  std::atomic<int> next{0};

  const auto run_one = [&](int i) {
    const std::string file =
        k == 1 ? "chain.csv" : "chain_" + std::to_string(i) + ".csv";
    json record{{"command", "run"},
                {"algo", settings.algo},
                {"chain", i},
                {"seed", settings.seed + static_cast<std::uint64_t>(i)},
                {"iterations", settings.iterations},
                {"thin", settings.thin},
                {"n", problem.data.n()},
                {"p", problem.data.p()},
                {"d", problem.data.d()},
                {"a", problem.data.a},
                {"mixing", scalemix::describe(problem.config.h)},
                {"file", file}};
    try {
      scalemix::ChainConfig local = chain_config;
      local.seed = settings.seed + static_cast<std::uint64_t>(i);
      if (settings.algo == "oracle") {
        const auto draws = scalemix::exact_posterior_sample(
            problem.data, problem.config.h,
            static_cast<std::size_t>(settings.iterations), local.seed);
        scalemix::ChainOutput out_chain;
        out_chain.states = draws.draws;
        out_chain.burn_in = 0;
        out_chain.thin = 1;
        out_chain.completed = true;
        for (const auto& st : out_chain.states)
          out_chain.drift_trace.push_back(scalemix::drift_value(st, problem.data));
        scalemix::write_chain_csv((dir / file).string(), out_chain);
        record["burn_in"] = 0;
        record["recorded"] = out_chain.states.size();
      } else {
        const scalemix::Algorithm algo = settings.algo == "pxda"
                                             ? scalemix::Algorithm::PxDa
                                             : scalemix::Algorithm::Da;
        const scalemix::ChainOutput out_chain =
            scalemix::run_chain_seeded(local, algo);
        if (!out_chain.completed)
          throw std::runtime_error("chain aborted: " + out_chain.error);
        scalemix::write_chain_csv((dir / file).string(), out_chain);
        record["burn_in"] = out_chain.burn_in;
        record["recorded"] = out_chain.states.size();
      }
      record["completed"] = true;
    } catch (const std::exception& err) {
      failures[i] = err.what();
      record["completed"] = false;
      record["error"] = err.what();
    }
    meta[i] = std::move(record);
  };

  const unsigned workers =
      std::min<unsigned>(worker_cap(), static_cast<unsigned>(k));
  if (workers <= 1) {
    for (int i = 0; i < k; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < k; i = next.fetch_add(1)) run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  std::ofstream meta_out(dir / "run_meta.jsonl", std::ios::binary);
  if (!meta_out) throw std::runtime_error("cannot write run_meta.jsonl");
  for (const auto& record : meta) meta_out << record.dump() << '\n';
  meta_out.close();

  int status = 0;
  for (int i = 0; i < k; ++i) {
    if (!failures[i].empty()) {
      std::cerr << "error: chain " << i << ": " << failures[i] << '\n';
      status = 1;
    }
  }
  return status;
}

int cmd_certify(const std::string& config_path, bool pxda, const std::string& out) {
  const Problem problem = load_problem(config_path);
  const scalemix::RegressionData& data = problem.data;
  const scalemix::Certificate cert =
      pxda ? scalemix::certify_pxda(problem.config.h, data.n(), data.p(), data.d(),
                                    data.a)
           : scalemix::certify(problem.config.h, data.n(), data.p(), data.d(),
                               data.a);
  const std::string report =
      scalemix::certificate_report(cert, scalemix::describe(problem.config.h));
  const std::string kv = scalemix::certificate_kv(cert);
  const fs::path dir = ensure_out_dir(out);
  std::ofstream file(dir / "certificate.txt", std::ios::binary);
  if (!file) throw std::runtime_error("cannot write certificate.txt");
  file << report << '\n' << kv;
  file.close();
  std::cout << report << '\n' << kv;
  return 0;
}

int cmd_oracle(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
               std::optional<std::size_t> draws_flag, const std::string& out) {
  const Problem problem = load_problem(config_path);
  std::size_t count = draws_flag.value_or(
      problem.config.has_run ? problem.config.run.iterations : 0);
  if (count == 0)
    throw std::runtime_error(
        "oracle needs --draws or a [run] section with iterations");
  const std::uint64_t seed =
      seed_flag.value_or(problem.config.has_run ? problem.config.run.seed : 0);
  const auto draws = scalemix::exact_posterior_sample(problem.data,
                                                      problem.config.h, count, seed);
  const fs::path dir = ensure_out_dir(out);
  scalemix::write_draws_csv((dir / "draws.csv").string(), draws.draws);
  return 0;
}

int cmd_diagnose(const std::string& input, const std::string& out) {
  const scalemix::NumericTable table = scalemix::read_numeric_table(input);
  const fs::path dir = ensure_out_dir(out);
  std::ofstream file(dir / "diagnostics.csv", std::ios::binary);
  if (!file) throw std::runtime_error("cannot write diagnostics.csv");
  file << "column,mean,se,ess\n";
  std::cout << "column,mean,se,ess\n";
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (table.columns[j] == "iter" || table.columns[j] == "draw") continue;
    const auto& series = table.values[j];
    std::string se = "nan", ess = "nan", mean;
    double total = 0.0;
    for (double v : series) total += v;
    mean = scalemix::format_double(total / static_cast<double>(series.size()));
    try {
      const auto bm = scalemix::batch_means_se(series);
      se = scalemix::format_double(bm.se);
    } catch (const std::exception&) {
    }
    try {
      ess = scalemix::format_double(scalemix::effective_sample_size(series));
    } catch (const std::exception&) {
    }
    const std::string row = table.columns[j] + "," + mean + "," + se + "," + ess;
    file << row << '\n';
    std::cout << row << '\n';
  }
  file.close();
  if (!file) throw std::runtime_error("failed writing diagnostics.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bayesian multivariate regression with scale-mixture-of-normal errors: "
      "two-block Gibbs samplers, ergodicity certificates, exact sampling in "
      "the solvable case, and chain diagnostics"};
  app.require_subcommand(1);

  std::string config_path, out_dir, algo, input;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<std::size_t> draws;
  bool pxda = false;

  CLI::App* run = app.add_subcommand("run", "run a sampler and write chain CSVs");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--algo", algo, "sampler: da, pxda, or oracle")
      ->check(CLI::IsMember({"da", "pxda", "oracle"}));
  run->add_option("--seed", seed, "RNG seed (overrides config)");
  run->add_option("--chains", chains, "number of independent chains")
      ->check(CLI::Range(1, 4096));
  run->add_option("--out", out_dir, "output directory");

  CLI::App* certify =
      app.add_subcommand("certify", "emit an ergodicity certificate");
  certify->add_option("--config", config_path, "config file")->required();
  certify->add_flag("--pxda", pxda, "certify the group-rescaled sampler");
  certify->add_option("--out", out_dir, "output directory");

  CLI::App* oracle =
      app.add_subcommand("oracle", "exact posterior draws in the solvable case");
  oracle->add_option("--config", config_path, "config file")->required();
  oracle->add_option("--seed", seed, "RNG seed (overrides config)");
  oracle->add_option("--draws", draws, "number of draws");
  oracle->add_option("--out", out_dir, "output directory");

  CLI::App* diagnose =
      app.add_subcommand("diagnose", "summarize a chain CSV: mean, SE, ESS");
  diagnose->add_option("--input", input, "chain CSV file")->required();
  diagnose->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, algo, seed, chains, out_dir);
    if (certify->parsed()) return cmd_certify(config_path, pxda, out_dir);
    if (oracle->parsed()) return cmd_oracle(config_path, seed, draws, out_dir);
    return cmd_diagnose(input, out_dir);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
