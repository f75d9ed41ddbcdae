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

#ifndef KCONFLICT_TEXT_H_
#define KCONFLICT_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kconflict {

// All character offsets in the toolkit count Unicode scalar values and are
// end-exclusive. Text is stored as UTF-8 and decoded where offsets matter.

// Throws DatasetError on invalid UTF-8.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);

size_t CodePointLength(std::string_view text);

// Code points [start, end) of `text`.
std::string SubstrCodePoints(std::string_view text, size_t start, size_t end);

bool IsSpace(char32_t c);
// ASCII letters and digits plus every non-ASCII code point that is not a
// space. Used for whole-token boundary checks.
bool IsWordChar(char32_t c);
char32_t ToLowerAscii(char32_t c);
std::string ToLowerAscii(std::string_view text);

std::string Trim(std::string_view text);
std::vector<std::string> SplitWhitespace(std::string_view text);

// Answer normalization: lowercase, strip ASCII punctuation, drop the
// standalone articles a/an/the, collapse whitespace.
//   "The U.S."  -> "us"
//   "  Heartbreak   Hotel " -> "heartbreak hotel"
std::string NormalizeAnswer(std::string_view text);

// Normalized forms of `aliases`, empty results dropped, sorted and unique.
std::vector<std::string> NormalizeAliases(const std::vector<std::string>& aliases);

}  // namespace kconflict

#endif  // KCONFLICT_TEXT_H_
