// Copyright 2026 The Momentfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// momentfuse: multimodal fusion pipeline command-line tool.
//
// Exit codes: 0 success, 1 runtime or numeric failure, 2 usage or
// validation failure.

#include <exception>
#include <iostream>

#include "commands.h"
#include "momentfuse/error.h"

int main(int argc, char** argv) {
  CLI::App app{"momentfuse: multimodal feature fusion, VisText and WALNet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "momentfuse 0.1.0");

  mf::cli::Action action;
  mf::cli::RegisterValidate(app, action);
  mf::cli::RegisterSynth(app, action);
  mf::cli::RegisterLogMel(app, action);
  mf::cli::RegisterNearestWord(app, action);
  mf::cli::RegisterTrainVisText(app, action);
  mf::cli::RegisterInferVisText(app, action);
  mf::cli::RegisterTrainWalNet(app, action);
  mf::cli::RegisterTrainClassifier(app, action);
  mf::cli::RegisterFuse(app, action);
  mf::cli::RegisterEvaluate(app, action);
  mf::cli::RegisterPipeline(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!action) return 2;
  try {
    return action();
  } catch (const mf::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mf::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
