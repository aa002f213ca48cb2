// Copyright 2026 The descjudge Authors
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

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "descjudge/errors.hpp"

namespace descjudge::jsonl {

using json = nlohmann::json;

/// Calls `fn(object, line_number)` for every non-blank line. Lines must hold
/// one JSON object each; anything else raises ParseError with the line number.
inline void for_each_record(const std::filesystem::path& path,
                            const std::function<void(const json&, std::size_t)>& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object())
            throw ParseError("malformed record", lineno);
        fn(rec, lineno);
    }
}

class Writer {
  public:
    explicit Writer(const std::filesystem::path& path, bool append = false)
        : out_(path, append ? std::ios::app : std::ios::trunc) {
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    }

    // One record per line, flushed immediately so a crash loses at most the
    // line being written.
    void write(const json& rec) {
        out_ << rec.dump() << '\n';
        out_.flush();
        if (!out_) throw IoError("write failed");
    }

  private:
    std::ofstream out_;
};

} // namespace descjudge::jsonl
