// Copyright 2026 The Arcoref Authors.
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

#include "arcoref/cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "arcoref/config.hpp"
#include "arcoref/conll.hpp"
#include "arcoref/metrics.hpp"
#include "arcoref/params.hpp"
#include "fixtures.hpp"

namespace arcoref {
namespace {

const std::string kSource = ARCOREF_SOURCE_DIR;
const std::string kLatin = kSource + "/tests/data/latin.conll";

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Small model flags for fast CLI runs.
std::vector<std::string> small(std::vector<std::string> args) {
  const std::vector<std::string> flags = {
      "-q", "--lstm-size", "4", "--ffnn-size", "5", "--ffnn-layers", "1", "--lstm-layers", "1",
      "--char-filter-size", "2", "--static-embedding-size", "4", "--contextual-embedding-size", "4",
      "--detector-projection-size", "3", "--feature-size", "3"};
  args.insert(args.begin(), flags.begin(), flags.end());
  return args;
}

TEST(CliTest, HelpListsEveryConfigField) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  for (const auto& field : config_fields()) {
    std::string flag = "--" + field.key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
  for (const char* sub : {"normalize", "train-md", "detect", "train-coref", "predict", "score"})
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
}

TEST(CliTest, ScoreOfKeyAgainstItselfIsPerfect) {
  const CliRun r = run({"score", "--key", kLatin, "--response", kLatin});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Avg F1"), std::string::npos);
  EXPECT_NE(r.out.find("100.0"), std::string::npos);
  EXPECT_EQ(r.out.find("  0.0"), std::string::npos);
}

TEST(CliTest, NormalizeLatinFixtureIsByteIdentical) {
  const auto dir = testing::temp_dir("cli_normalize");
  const std::string output = (dir / "out.conll").string();
  const CliRun r = run({"normalize", "-i", kLatin, "-o", output});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(slurp(output), slurp(kLatin));
  const CliRun to_stdout = run({"normalize", "-i", kLatin});
  EXPECT_EQ(to_stdout.out, slurp(kLatin));
}

TEST(CliTest, NormalizeChangesArabicSurfacesOnly) {
  const auto dir = testing::temp_dir("cli_arabic");
  const std::string input = (dir / "in.conll").string();
  Document doc = testing::tiny_document();
  doc.tokens[0].surface = "أَحْمَد";
  write_conll_file(input, {doc});
  const CliRun r = run({"normalize", "-i", input});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto docs = parse_conll_string(r.out);
  EXPECT_EQ(docs[0].tokens[0].surface, "احمد");
  EXPECT_EQ(docs[0].gold_clusters, doc.gold_clusters);
}

TEST(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"score", "--key", kLatin}).code, kExitUsage);
  EXPECT_EQ(run({"score", "--key", "/nonexistent", "--response", kLatin}).code, kExitUsage);
  EXPECT_EQ(run({"--lstm-size", "abc", "train-md", "--train", kLatin, "-o", "/tmp/x"}).code,
            kExitUsage);
  EXPECT_EQ(run({"--mode", "sideways", "train-coref", "--train", kLatin, "-o", "/tmp/x"}).code,
            kExitUsage);
  EXPECT_EQ(run({"--config", "/nonexistent.cfg", "score", "--key", kLatin, "--response", kLatin})
                .code,
            kExitUsage);
}

TEST(CliTest, DataErrorsExitTwo) {
  const auto dir = testing::temp_dir("cli_data");
  const std::string bad = (dir / "bad.conll").string();
  std::ofstream(bad) << "#begin document (d); part 000\nd\t0\t0\tx\t(0\n#end document\n";
  const CliRun r = run({"score", "--key", bad, "--response", kLatin});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  Document other = testing::tiny_document();
  other.doc_id = "other";
  const std::string mismatched = (dir / "other.conll").string();
  write_conll_file(mismatched, {other});
  EXPECT_EQ(run({"score", "--key", kLatin, "--response", mismatched}).code, kExitData);

  // Candidates that do not cover the training document.
  const std::string model = (dir / "model.ckpt").string();
  const std::string mentions = (dir / "mentions.txt").string();
  std::ofstream(mentions) << "elsewhere\t0\t0\t0\t1.5\n";
  const CliRun pipeline = run(small({"--mode", "pipeline", "--training-steps", "1", "train-coref",
                                     "--train", kLatin, "--mentions", mentions, "-o", model}));
  EXPECT_EQ(pipeline.code, kExitData);
  EXPECT_NE(pipeline.err.find("elsewhere/0"), std::string::npos) << pipeline.err;
  // Without any candidate file the command line itself is incomplete.
  EXPECT_EQ(run(small({"--mode", "pipeline", "--training-steps", "1", "train-coref", "--train",
                       kLatin, "-o", model}))
                .code,
            kExitUsage);
}

TEST(CliTest, NumericErrorsExitThree) {
  const auto dir = testing::temp_dir("cli_numeric");
  const std::string vectors = (dir / "huge.vec").string();
  {
    std::ofstream out(vectors);
    for (const char* w : {"John", "met", "Mary", ".", "He", "liked", "her", "cafe"})
      out << w << "\t1.7e308 1.7e308 1.7e308 1.7e308\n";
  }
  const CliRun r = run(small({"--static-embeddings", vectors, "--training-steps", "1",
                           "train-coref", "--train", kLatin, "-o",
                           (dir / "m.ckpt").string()}));
  EXPECT_EQ(r.code, kExitNumeric) << r.err;
}

TEST(CliTest, FlagsOverrideConfigFileOverDefaults) {
  const auto dir = testing::temp_dir("cli_config");
  const std::string cfg = (dir / "run.cfg").string();
  std::ofstream(cfg) << "detector_steps=3\nlstm_size=6\n";
  const std::string model = (dir / "md.ckpt").string();
  const CliRun r = run(small({"--config", cfg, "--detector-steps", "2", "train-md", "--train", kLatin,
                           "-o", model}));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ckpt = nn::load_checkpoint(model);
  EXPECT_EQ(ckpt.config.at("detector_steps"), "2");
  // The file sets 6 but the explicit flag from small() wins.
  EXPECT_EQ(ckpt.config.at("lstm_size"), "4");
  EXPECT_EQ(ckpt.config.at("ffnn_layers"), "1");
  EXPECT_EQ(ckpt.config.at("max_span_width"), "30");
}

TEST(CliTest, ConfigIsLoggedUnlessQuiet) {
  const auto dir = testing::temp_dir("cli_log");
  std::vector<std::string> args = small({"--detector-steps", "1", "train-md", "--train", kLatin,
                                         "-o", (dir / "md.ckpt").string()});
  args.erase(args.begin());
  const CliRun r = run(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("seed"), std::string::npos);
  EXPECT_NE(r.err.find("detector_steps"), std::string::npos);
}

TEST(CliTest, GenerateCorpusIsDeterministic) {
  const CliRun a = run({"generate-corpus", "--documents", "2", "--corpus-seed", "5"});
  const CliRun b = run({"generate-corpus", "--documents", "2", "--corpus-seed", "5"});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(parse_conll_string(a.out).size(), 2u);
  EXPECT_EQ(run({"generate-corpus", "--documents", "0"}).code, kExitUsage);
}

TEST(CliTest, BundledCorpusMatchesGenerator) {
  const CliRun r = run({"generate-corpus"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, slurp(kSource + "/data/synthetic.conll"));
}

// train-md, detect, train-coref in annealing mode, predict and score on the
// bundled synthetic corpus with the desk configuration.
TEST(CliTest, FullPipelineOnSyntheticCorpus) {
  const auto dir = testing::temp_dir("cli_pipeline");
  const std::string corpus = kSource + "/data/synthetic.conll";
  const std::string cfg = kSource + "/data/desk.cfg";
  const std::string md = (dir / "md.ckpt").string();
  const std::string mentions = (dir / "mentions.txt").string();
  const std::string coref = (dir / "coref.ckpt").string();
  const std::string predicted = (dir / "predicted.conll").string();

  CliRun r = run({"--config", cfg, "-q", "train-md", "--train", corpus, "-o", md});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = run({"--config", cfg, "-q", "detect", "--model", md, "-i", corpus, "-o", mentions});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = run({"--config", cfg, "-q", "--mode", "anneal", "train-coref", "--train", corpus,
           "--mentions", mentions, "-o", coref});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = run({"-q", "predict", "--model", coref, "-i", corpus, "--mentions", mentions, "-o",
           predicted});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  // An annealing-trained model needs candidates at inference time.
  EXPECT_EQ(run({"-q", "predict", "--model", coref, "-i", corpus}).code, kExitUsage);
  r = run({"score", "--key", corpus, "--response", predicted});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::cout << r.out;
  const MetricReport report = score_files(corpus, predicted);
  EXPECT_GE(report.conll_f1, 95.0);
}

}  // namespace
}  // namespace arcoref
