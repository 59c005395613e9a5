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

// Corpus, stream and report file formats.

#ifndef WALKGUARD_CLI_IO_HPP_
#define WALKGUARD_CLI_IO_HPP_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "walkguard/ead.hpp"

namespace walkguard::cli {

struct SampleRecord {
  std::string id;
  std::string reference;
  std::vector<std::string> candidates;
  std::optional<std::vector<std::string>> keywords;
  std::optional<std::string> group_id;
  std::size_t line = 0;
};

struct RecordError {
  std::size_t line = 0;
  std::string id;  // empty when the record could not be parsed far enough
  std::string message;
};

struct SampleFile {
  std::vector<SampleRecord> samples;
  std::vector<RecordError> errors;
};

// JSON Lines {"id", "reference", "candidates": [..], "keywords"?: [..],
// "group_id"?}. Bad lines and repeated ids become RecordErrors; the rest of
// the file is still read.
SampleFile read_samples(std::istream& in);

// JSON Lines frames {"frame_id", "features"?, "danger_true"?, "danger_pred"?}.
// Any malformed line is fatal (ParseError): frames are order dependent.
std::vector<FrameRecord> read_stream(std::istream& in);

// {"frame_id", "danger_pred", "trigger"} per line.
void write_trigger_jsonl(std::ostream& out, const std::vector<TriggerDecision>& decisions);

std::string record_error_json(const RecordError& e);

// Minimal RFC 4180 CSV: fields containing ',', '"' or newlines are quoted.
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);
// Splits one physical line. Throws std::invalid_argument on an unterminated quote.
std::vector<std::string> csv_split(std::string_view line);

}  // namespace walkguard::cli

#endif  // WALKGUARD_CLI_IO_HPP_
