// Copyright 2026 The kconflict Authors
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

#ifndef KCONFLICT_TOOLS_JSON_CONFIG_H_
#define KCONFLICT_TOOLS_JSON_CONFIG_H_

#include <istream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace kconflict::cli {

// Reads a flat JSON object as CLI11 configuration. Keys are option long
// names; underscores and dashes are interchangeable. Nested objects map to
// subcommand sections.
// Keys apply to the innermost subcommand parsed from the command line when
// `root` is set, otherwise to the app that owns the config option.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root = nullptr) : root_(root) {}
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  const CLI::App* root_;
};

}  // namespace kconflict::cli

#endif  // KCONFLICT_TOOLS_JSON_CONFIG_H_
