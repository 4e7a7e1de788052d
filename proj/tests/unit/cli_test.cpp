// Copyright 2026 The wbaug Authors
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dataset.hpp"

namespace wbaug {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  static testing::TempDir& dir() {
    static testing::TempDir d("cli");
    return d;
  }

  // Runs the CLI and returns its exit status; stdout and stderr go to `log`.
  static int run(const std::string& args, std::string* log = nullptr) {
    const fs::path out = dir().path() / "log.txt";
    const std::string cmd =
        std::string(WBAUG_CLI) + " " + args + " > '" + out.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    if (log) {
      std::ifstream in(out);
      std::stringstream ss;
      ss << in.rdbuf();
      *log = ss.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static fs::path path(const std::string& name) { return dir().path() / name; }

  static void SetUpTestSuite() {
    ASSERT_EQ(run("synth -o " + path("data").string() + " --count 56 --width 16 --height 12"), 0);
    ASSERT_EQ(run("build-model " + path("data/manifest.txt").string() + " -o " +
                  path("emu.wbm").string()),
              0);
  }
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("augment " + path("emu.wbm").string()), 1);  // missing -o
  EXPECT_EQ(run("build-model " + path("data/manifest.txt").string() + " -o x --direction up"), 1);
}

TEST_F(CliTest, SynthReportsCounts) {
  std::string log;
  ASSERT_EQ(run("synth -o " + path("small").string() + " --count 2 --width 8 --height 8", &log), 0);
  EXPECT_NE(log.find("groups: 2"), std::string::npos) << log;
  EXPECT_NE(log.find("files: 22"), std::string::npos) << log;
  EXPECT_TRUE(fs::exists(path("small/scene_0001_7500K_AS.png")));
}

TEST_F(CliTest, InfoDescribesModel) {
  std::string log;
  ASSERT_EQ(run("info " + path("emu.wbm").string(), &log), 0);
  EXPECT_NE(log.find("records: 56"), std::string::npos) << log;
  EXPECT_NE(log.find("direction: emulate"), std::string::npos);
  EXPECT_EQ(run("info " + path("missing.wbm").string(), &log), 3);
  EXPECT_NE(log.find("missing.wbm"), std::string::npos);
}

TEST_F(CliTest, BuildDataErrorsExitTwo) {
  std::ofstream(path("bad_manifest.txt")) << "a.png;2850K_CS=b.png\n";
  std::string log;
  EXPECT_EQ(run("build-model " + path("bad_manifest.txt").string() + " -o " + path("x.wbm").string(), &log), 2);
  EXPECT_NE(log.find("at least 56"), std::string::npos) << log;
}

TEST_F(CliTest, AugmentWritesRequestedSettings) {
  std::string log;
  ASSERT_EQ(run("augment " + path("emu.wbm").string() + " " + path("data/scene_0003.png").string() +
                    " -o " + path("aug").string() + " --settings 2850K_CS,6500K_AS",
                &log),
            0)
      << log;
  EXPECT_NE(log.find("processed: 1"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("aug/scene_0003_2850K_CS.png")));
  EXPECT_TRUE(fs::exists(path("aug/scene_0003_6500K_AS.png")));
  EXPECT_TRUE(fs::exists(path("aug/run_manifest.json")));
  EXPECT_EQ(run("augment " + path("emu.wbm").string() + " x.png -o " + path("aug2").string() +
                " --settings warm"),
            1);
  // Well-formed but absent from the model vocabulary.
  EXPECT_EQ(run("augment " + path("emu.wbm").string() + " x.png -o " + path("aug2").string() +
                " --settings 1234K_CS"),
            3);
}

TEST_F(CliTest, ModelDirectionMismatchExitsThree) {
  std::string log;
  EXPECT_EQ(run("correct " + path("emu.wbm").string() + " " + path("data/scene_0003.png").string() +
                    " -o " + path("cor").string(),
                &log),
            3);
  EXPECT_NE(log.find("direction"), std::string::npos) << log;
}

}  // namespace
}  // namespace wbaug
