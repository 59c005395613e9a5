// Copyright 2026 The Walkguard Authors.
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

#include "walkguard/cli/io.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "walkguard/errors.hpp"

namespace walkguard::cli {

using nlohmann::json;

namespace {

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::vector<std::string> string_array(const json& v, const char* field) {
  if (!v.is_array()) throw std::invalid_argument(std::string("'") + field + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw std::invalid_argument(std::string("'") + field + "' entries must be strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

SampleFile read_samples(std::istream& in) {
  SampleFile file;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      file.errors.push_back({lineno, "", "malformed JSON"});
      continue;
    }
    std::string id;
    try {
      if (!rec.is_object()) throw std::invalid_argument("record must be a JSON object");
      if (!rec.contains("id") || !rec["id"].is_string()) {
        throw std::invalid_argument("missing string field 'id'");
      }
      id = rec["id"].get<std::string>();
      SampleRecord s;
      s.id = id;
      s.line = lineno;
      if (!rec.contains("reference") || !rec["reference"].is_string()) {
        throw std::invalid_argument("missing string field 'reference'");
      }
      s.reference = rec["reference"].get<std::string>();
      if (!rec.contains("candidates")) throw std::invalid_argument("missing field 'candidates'");
      s.candidates = string_array(rec["candidates"], "candidates");
      if (rec.contains("keywords") && !rec["keywords"].is_null()) {
        s.keywords = string_array(rec["keywords"], "keywords");
      }
      if (rec.contains("group_id") && !rec["group_id"].is_null()) {
        if (!rec["group_id"].is_string()) throw std::invalid_argument("'group_id' must be a string");
        s.group_id = rec["group_id"].get<std::string>();
      }
      if (!ids.insert(id).second) throw std::invalid_argument("duplicate id '" + id + "'");
      file.samples.push_back(std::move(s));
    } catch (const std::invalid_argument& e) {
      file.errors.push_back({lineno, id, e.what()});
    }
  }
  return file;
}

std::vector<FrameRecord> read_stream(std::istream& in) {
  std::vector<FrameRecord> frames;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      throw ParseError(lineno, "malformed JSON");
    }
    if (!rec.is_object() || !rec.contains("frame_id") || !rec["frame_id"].is_string()) {
      throw ParseError(lineno, "frame needs a string 'frame_id'");
    }
    FrameRecord f;
    f.frame_id = rec["frame_id"].get<std::string>();
    if (rec.contains("features") && !rec["features"].is_null()) {
      if (!rec["features"].is_array()) throw ParseError(lineno, "'features' must be an array");
      std::vector<double> v;
      for (const auto& x : rec["features"]) {
        if (!x.is_number()) throw ParseError(lineno, "'features' entries must be numbers");
        v.push_back(x.get<double>());
      }
      f.features = std::move(v);
    }
    auto level = [&](const char* key) -> std::optional<DangerLevel> {
      if (!rec.contains(key) || rec[key].is_null()) return std::nullopt;
      const auto& v = rec[key];
      auto l = v.is_string() ? parse_danger_level(v.get<std::string>()) : std::nullopt;
      if (!l) throw ParseError(lineno, std::string("'") + key + "' must be \"A\", \"B\" or \"C\"");
      return l;
    };
    f.true_level = level("danger_true");
    f.predicted_level = level("danger_pred");
    frames.push_back(std::move(f));
  }
  return frames;
}

void write_trigger_jsonl(std::ostream& out, const std::vector<TriggerDecision>& decisions) {
  for (const auto& d : decisions) {
    json rec = json::object();
    rec["frame_id"] = d.frame_id;
    rec["danger_pred"] = to_string(d.level);
    rec["trigger"] = d.trigger;
    out << rec.dump() << '\n';
  }
}

std::string record_error_json(const RecordError& e) {
  json rec = json::object();
  rec["line"] = e.line;
  rec["id"] = e.id.empty() ? json(nullptr) : json(e.id);
  rec["error"] = e.message;
  return rec.dump();
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  return out;
}

std::vector<std::string> csv_split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  out.push_back(std::move(cur));
  return out;
}

}  // namespace walkguard::cli
