// Copyright (c) 2026 The unitvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <glog/logging.h>

#include "cli/commands.h"

namespace {

void AddCommon(CLI::App* cmd, unitvc::CommonOptions* common) {
  cmd->add_option("--config", common->config_path, "key = value config file");
  cmd->add_option("--set", common->overrides,
                  "override one config key (key=value), repeatable");
}

}  // namespace

int main(int argc, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = true;

  CLI::App app{"unitvc: unit-based voice conversion with prosody control"};
  app.require_subcommand(1);

  unitvc::CommonOptions config_opts;
  bool dump = false;
  auto* config = app.add_subcommand("config", "print the effective config");
  AddCommon(config, &config_opts);
  config->add_flag("--dump", dump, "print every key with its value");

  unitvc::ExtractOptions extract;
  auto* ext = app.add_subcommand("extract", "build the feature cache");
  AddCommon(ext, &extract.common);
  ext->add_option("--manifest", extract.manifest, "wav list")->required();
  ext->add_option("--out", extract.cache_dir, "cache directory")->required();
  ext->add_option("--threads", extract.threads, "worker threads");

  unitvc::TrainOptions train;
  auto* tr = app.add_subcommand("train", "train or resume");
  AddCommon(tr, &train.common);
  tr->add_option("--cache", train.cache_dir, "cache directory")->required();
  tr->add_option("--checkpoint-dir", train.checkpoint_dir)->required();
  tr->add_option("--steps", train.steps, "total steps (default train.num_steps)");

  unitvc::ConvertOptions convert;
  auto* cv = app.add_subcommand("convert", "convert one utterance");
  AddCommon(cv, &convert.common);
  cv->add_option("--checkpoint", convert.checkpoint)->required();
  cv->add_option("--source", convert.source)->required();
  cv->add_option("--target", convert.target)->required();
  cv->add_option("--transfer", convert.transfer,
                 "speaker | prosody | all | comma list")
      ->capture_default_str();
  cv->add_option("--prosody-source", convert.prosody_source, "gt | predicted");
  cv->add_option("--out", convert.out)->required();

  unitvc::BatchConvertOptions batch;
  auto* bc = app.add_subcommand("batch-convert", "convert a manifest");
  AddCommon(bc, &batch.common);
  bc->add_option("--checkpoint", batch.checkpoint)->required();
  bc->add_option("--manifest", batch.manifest)->required();
  bc->add_option("--out-dir", batch.out_dir)->required();

  unitvc::EvalOptions eval;
  auto* ev = app.add_subcommand("eval", "prosody correlation and cosine metrics");
  AddCommon(ev, &eval.common);
  ev->add_option("--pairs", eval.pairs, "target/converted pairs")->required();
  ev->add_option("--out", eval.out, "JSON report path");
  ev->add_option("--embeddings", eval.embeddings, "external embedding file");
  ev->add_option("--checkpoint", eval.checkpoint,
                 "run the manifest's conversion requests first");
  ev->add_option("--work-dir", eval.work_dir);

  unitvc::ExportOptions exp;
  auto* ex = app.add_subcommand("export-embeddings",
                                "dump attribute vectors per utterance");
  AddCommon(ex, &exp.common);
  ex->add_option("--checkpoint", exp.checkpoint)->required();
  ex->add_option("--manifest", exp.manifest)->required();
  ex->add_option("--kind", exp.kind, "pitch_energy | rhythm | speaker")
      ->capture_default_str();
  ex->add_option("--out", exp.out)->required();

  unitvc::ToyCorpusOptions toy;
  auto* mt = app.add_subcommand("make-toy", "write a synthetic toy corpus");
  mt->add_option("--out", toy.out_dir)->required();
  mt->add_option("--count", toy.count)->capture_default_str();
  mt->add_option("--seconds", toy.seconds)->capture_default_str();
  mt->add_option("--seed", toy.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return unitvc::kExitUsage;
  }

  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  if (config->parsed()) return unitvc::CmdConfigDump(config_opts, out, err);
  if (ext->parsed()) return unitvc::CmdExtract(extract, out, err);
  if (tr->parsed()) return unitvc::CmdTrain(train, out, err);
  if (cv->parsed()) return unitvc::CmdConvert(convert, out, err);
  if (bc->parsed()) return unitvc::CmdBatchConvert(batch, out, err);
  if (ev->parsed()) return unitvc::CmdEval(eval, out, err);
  if (ex->parsed()) return unitvc::CmdExportEmbeddings(exp, out, err);
  if (mt->parsed()) return unitvc::CmdMakeToyCorpus(toy, out, err);
  return unitvc::kExitUsage;
}
