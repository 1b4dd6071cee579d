// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "intentforge.h"

namespace {

constexpr int kExitConfig = 3;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  // Convenience overrides merged into the config JSON.
  std::string registry;
  std::string embeddings;
  std::string out;
  std::string mdb_checkpoint;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool training) {
  cmd->add_option("--config", args.config_path, "JSON config file")->required();
  cmd->add_option("--seed", args.seed, "root RNG seed")->default_val("0");
  if (training) {
    cmd->add_option("--registry", args.registry, "dataset registry manifest");
    cmd->add_option("--embeddings", args.embeddings, "base embeddings JSONL");
    cmd->add_option("--out", args.out, "output checkpoint path");
    cmd->add_option("--mdb-checkpoint", args.mdb_checkpoint, "MDB head checkpoint");
  }
}

// Reads the config file and applies any CLI overrides. Exits with the
// configuration code when the file is unreadable or not JSON.
std::string merged_config(const CommonArgs& args) {
  std::ifstream is(args.config_path);
  if (!is) {
    std::cerr << "error: cannot open config file: " << args.config_path << "\n";
    std::exit(kExitConfig);
  }
  std::stringstream buffer;
  buffer << is.rdbuf();
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
    std::exit(kExitConfig);
  }
  if (!args.registry.empty()) config["registry"] = args.registry;
  if (!args.embeddings.empty()) config["embeddings"] = args.embeddings;
  if (!args.out.empty()) config["out"] = args.out;
  if (!args.mdb_checkpoint.empty()) config["mdb_checkpoint"] = args.mdb_checkpoint;
  return config.dump();
}

int dispatch(ifx_status (*fn)(const char*, uint64_t, char**), const CommonArgs& args) {
  const std::string config = merged_config(args);
  char* summary = nullptr;
  const ifx_status status = fn(config.c_str(), args.seed, &summary);
  if (status != IFX_OK) {
    std::cerr << "error: " << ifx_last_error() << "\n";
    return static_cast<int>(status);
  }
  if (summary != nullptr) {
    std::cout << summary;
    ifx_string_free(summary);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intentforge: open intent induction toolkit"};
  app.require_subcommand(1);

  CommonArgs gen_args, extract_args, mdb_args, pgt_args, induce_args, eval_args;
  add_common(app.add_subcommand("gen-fixture", "generate a synthetic corpus"), gen_args, false);
  add_common(app.add_subcommand("extract", "filter InformIntent utterances"), extract_args, false);
  add_common(app.add_subcommand("train-mdb", "train the multi-domain head"), mdb_args, true);
  add_common(app.add_subcommand("train-pgt", "cluster-tune a head with gradient transfer"),
             pgt_args, true);
  add_common(app.add_subcommand("induce", "run the full induction pipeline"), induce_args, false);
  add_common(app.add_subcommand("evaluate", "score predictions against references"), eval_args,
             false);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("gen-fixture")) return dispatch(ifx_gen_fixture, gen_args);
  if (app.got_subcommand("extract")) return dispatch(ifx_extract, extract_args);
  if (app.got_subcommand("train-mdb")) return dispatch(ifx_train_mdb, mdb_args);
  if (app.got_subcommand("train-pgt")) return dispatch(ifx_train_pgt, pgt_args);
  if (app.got_subcommand("induce")) return dispatch(ifx_induce, induce_args);
  if (app.got_subcommand("evaluate")) return dispatch(ifx_evaluate, eval_args);
  return kExitConfig;
}
