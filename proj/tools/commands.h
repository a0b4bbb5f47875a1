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

#ifndef MOMENTFUSE_TOOLS_COMMANDS_H_
#define MOMENTFUSE_TOOLS_COMMANDS_H_

#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"

namespace mf::cli {

// Each Register* adds one subcommand whose callback stores the work to run
// in `action`; main() runs it after parsing so errors map to exit codes.
using Action = std::function<int()>;

void RegisterValidate(CLI::App& app, Action& action);
void RegisterSynth(CLI::App& app, Action& action);
void RegisterLogMel(CLI::App& app, Action& action);
void RegisterNearestWord(CLI::App& app, Action& action);
void RegisterTrainVisText(CLI::App& app, Action& action);
void RegisterInferVisText(CLI::App& app, Action& action);
void RegisterTrainWalNet(CLI::App& app, Action& action);
void RegisterTrainClassifier(CLI::App& app, Action& action);
void RegisterFuse(CLI::App& app, Action& action);
void RegisterEvaluate(CLI::App& app, Action& action);
void RegisterPipeline(CLI::App& app, Action& action);

inline std::ostream& Log() { return std::cerr; }

}  // namespace mf::cli

#endif  // MOMENTFUSE_TOOLS_COMMANDS_H_
