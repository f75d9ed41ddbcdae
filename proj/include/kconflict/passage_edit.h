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

#ifndef KCONFLICT_PASSAGE_EDIT_H_
#define KCONFLICT_PASSAGE_EDIT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kconflict/corpus.h"

namespace kconflict {

// Replace code points [start, end) of a passage with `replacement`.
struct TextEdit {
  size_t start = 0;
  size_t end = 0;
  std::string replacement;
  // When set, the replacement span is annotated as an entity of this type.
  std::optional<EntityType> annotate;
};

// Splices `edits` (non-overlapping) into the passage text. Mentions that
// overlap an edit are dropped, the rest are shifted; sentence spans are
// remapped. Token lists are left alone.
void ApplyTextEdits(Passage& passage, std::vector<TextEdit> edits);

// Like ApplyTextEdits, but also rewrites the tokens of every sentence an
// edit touches: the overlapped tokens are merged and re-split on whitespace.
// The last piece inherits the merged group's head and relation, earlier
// pieces attach to it as "compound".
void ApplyEditsWithRetokenization(Passage& passage, std::vector<TextEdit> edits);

struct ReplacementToken {
  Token token;  // token.head is ignored
  // 0: attach where the replaced group attached; k > 0: to the k-th
  // replacement token (1-based).
  int local_head = 0;
};

// Replaces tokens [first, last) of `parse` with `replacement`. Tokens outside
// the range that pointed into it are re-pointed at replacement[anchor]. An
// empty replacement deprel inherits the replaced group's relation.
void ReplaceTokenRange(SentenceParse& parse, size_t first, size_t last,
                       const std::vector<ReplacementToken>& replacement, size_t anchor);

}  // namespace kconflict

#endif  // KCONFLICT_PASSAGE_EDIT_H_
