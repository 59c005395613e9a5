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

#ifndef WALKGUARD_FORMAT_HPP_
#define WALKGUARD_FORMAT_HPP_

#include <string>
#include <string_view>

namespace walkguard {

// Locale-independent "%.10g", with "inf"/"-inf"/"nan" spelled out.
std::string format_real(double x);

// Shortest text that parses back to exactly x.
std::string format_real_exact(double x);

// Strict full-string parse; accepts "inf"/"-inf". Returns false on failure.
bool parse_real(std::string_view s, double& out);

}  // namespace walkguard

#endif  // WALKGUARD_FORMAT_HPP_
