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

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "descjudge/errors.hpp"
#include "descjudge/jsonl.hpp"

namespace descjudge {

enum class GatewayMode { RECORD, REPLAY, LIVE };

inline const char* gateway_mode_name(GatewayMode m) {
    switch (m) {
        case GatewayMode::RECORD: return "RECORD";
        case GatewayMode::REPLAY: return "REPLAY";
        case GatewayMode::LIVE: return "LIVE";
    }
    return "?";
}

inline std::optional<GatewayMode> gateway_mode_from_name(const std::string& name) {
    if (name == "RECORD" || name == "record") return GatewayMode::RECORD;
    if (name == "REPLAY" || name == "replay") return GatewayMode::REPLAY;
    if (name == "LIVE" || name == "live") return GatewayMode::LIVE;
    return std::nullopt;
}

/// Append-only request/response log keyed by request digest. RECORD appends
/// one line per new exchange; REPLAY loads the file into memory and serves
/// responses without any network activity. When a digest appears more than
/// once (e.g. a recorded retry), the latest entry wins.
class Cassette {
  public:
    Cassette() = default;

    static std::unique_ptr<Cassette> open_replay(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path))
            throw IoError("cassette not found: " + path.string());
        auto c = std::make_unique<Cassette>();
        c->load(path);
        return c;
    }

    static std::unique_ptr<Cassette> open_record(const std::filesystem::path& path) {
        auto c = std::make_unique<Cassette>();
        if (std::filesystem::exists(path)) c->load(path);
        c->writer_ = std::make_unique<jsonl::Writer>(path, /*append=*/true);
        return c;
    }

    std::optional<std::string> lookup(const std::string& digest) const {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(digest);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    /// Records an exchange. Identical (digest, response) pairs are written
    /// once; a changed response for a known digest is appended and supersedes
    /// the earlier entry on the next load.
    void record(const std::string& digest, const std::string& judge_id, const std::string& response_text,
                std::chrono::milliseconds latency,
                std::chrono::system_clock::time_point timestamp = std::chrono::system_clock::now()) {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(digest);
        if (it != entries_.end() && it->second == response_text) return;
        entries_[digest] = response_text;
        if (!writer_) return;
        writer_->write(nlohmann::json{
            {"request_digest", digest},
            {"judge_id", judge_id},
            {"response_text", response_text},
            {"latency_ms",
             std::chrono::duration_cast<std::chrono::milliseconds>(latency).count()},
            {"timestamp", std::chrono::duration_cast<std::chrono::milliseconds>(
                              timestamp.time_since_epoch())
                              .count()},
        });
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

  private:
    void load(const std::filesystem::path& path) {
        jsonl::for_each_record(path, [this](const nlohmann::json& rec, std::size_t lineno) {
            if (!rec.contains("request_digest") || !rec.contains("response_text"))
                throw ParseError("cassette record missing digest or response", lineno);
            entries_[rec.at("request_digest").get<std::string>()] =
                rec.at("response_text").get<std::string>();
        });
    }

    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::string> entries_;
    std::unique_ptr<jsonl::Writer> writer_;
};

} // namespace descjudge
