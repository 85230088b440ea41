#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gfm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"graph generation toolkit: prior sampling, transport coupling, "
               "flow integration, evaluation, and verification suites"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--seed", seed, "rng seed (fans out to per-stage substreams)")->capture_default_str();
  app.add_option("--threads", threads, "worker threads for pairwise solves")->capture_default_str();

  gfm::SampleOptions sample;
  auto* cmd_sample = app.add_subcommand("sample", "sample a corpus from a prior config");
  cmd_sample->add_option("--config", sample.config_path, "prior config JSON")->required();
  cmd_sample->add_option("--out", sample.out_path, "output JSON-lines corpus")->required();
  cmd_sample->add_option("--graphs", sample.n_graphs, "number of graphs")->capture_default_str();
  cmd_sample->add_option("--nodes", sample.n_nodes, "node budget per graph")->capture_default_str();

  gfm::CoupleOptions couple;
  auto* cmd_couple = app.add_subcommand("couple", "match noise and target corpora");
  cmd_couple->add_option("--noise", couple.noise_path, "noise corpus")->required();
  cmd_couple->add_option("--target", couple.target_path, "target corpus")->required();
  cmd_couple->add_option("--out", couple.out_path, "coupling JSON output")->required();
  cmd_couple->add_option("--config", couple.config_path, "feature config JSON");
  cmd_couple->add_option("--alpha", couple.fgw.alpha, "feature/structure tradeoff")->capture_default_str();
  cmd_couple->add_option("--max-iters", couple.fgw.max_iters, "solver iteration cap")->capture_default_str();
  cmd_couple->add_option("--tol", couple.fgw.tol, "solver convergence tolerance")->capture_default_str();
  cmd_couple->add_option("--embed-steps", couple.fgw.embed_steps, "walk steps in the embedding")
      ->capture_default_str();

  gfm::FlowRunOptions flow;
  auto* cmd_flow = app.add_subcommand("flow", "flow integration commands");
  auto* cmd_flow_run = cmd_flow->add_subcommand("run", "integrate coupled pairs and project");
  cmd_flow_run->add_option("--coupling", flow.coupling_path, "coupling JSON from couple")->required();
  cmd_flow_run->add_option("--out", flow.out_path, "generated JSON-lines corpus")->required();
  cmd_flow_run->add_option("--config", flow.config_path, "chemistry config JSON");
  cmd_flow_run->add_option("--steps", flow.steps, "integration steps")->capture_default_str();
  cmd_flow_run->add_option("--eps", flow.eps, "perturbation size")->capture_default_str();
  cmd_flow_run->add_option("--threshold", flow.threshold, "edge threshold")->capture_default_str();
  std::string weights_csv;
  cmd_flow_run->add_option("--weights", weights_csv,
                           "lambda_x,lambda_e,beta_end,beta_val,beta_atom");

  gfm::EvalOptions eval;
  auto* cmd_eval = app.add_subcommand("eval", "graph-statistics evaluation");
  cmd_eval->add_option("--gen", eval.gen_path, "generated corpus")->required();
  cmd_eval->add_option("--train", eval.train_path, "training corpus")->required();
  cmd_eval->add_option("--test", eval.test_path, "test corpus")->required();
  cmd_eval->add_option("--out", eval.out_path, "report JSON output")->required();
  cmd_eval->add_option("--config", eval.config_path, "chemistry config JSON");

  gfm::VerifyOptions verify;
  auto* cmd_verify = app.add_subcommand("verify", "run a verification suite");
  cmd_verify->add_option("suite", verify.suite, "hom | fgw | flow | all")->required();
  cmd_verify->add_option("--out", verify.out_path, "report JSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_sample) {
      sample.seed = seed;
      return gfm::run_sample(sample);
    }
    if (*cmd_couple) {
      couple.seed = seed;
      couple.threads = threads;
      return gfm::run_couple(couple);
    }
    if (*cmd_flow_run) {
      flow.seed = seed;
      if (!weights_csv.empty()) {
        double v[5];
        if (std::sscanf(weights_csv.c_str(), "%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3],
                        &v[4]) != 5)
          throw CLI::ValidationError("--weights expects five comma-separated values");
        flow.weights = {v[0], v[1], v[2], v[3], v[4]};
      }
      return gfm::run_flow(flow);
    }
    if (*cmd_flow) {
      std::cerr << "flow: expected the 'run' subcommand\n";
      return 2;
    }
    if (*cmd_eval) return gfm::run_eval(eval);
    if (*cmd_verify) {
      verify.seed = seed;
      return gfm::run_verify(verify);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
