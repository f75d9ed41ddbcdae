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

#include "kconflict/passage_edit.h"

#include <algorithm>

#include "kconflict/error.h"
#include "kconflict/text.h"

namespace kconflict {

namespace {

void SortAndCheck(std::vector<TextEdit>& edits) {
  std::sort(edits.begin(), edits.end(),
            [](const TextEdit& a, const TextEdit& b) { return a.start < b.start; });
  for (size_t i = 0; i < edits.size(); ++i) {
    if (edits[i].start > edits[i].end) throw Error("text edit with start > end");
    if (i > 0 && edits[i].start < edits[i - 1].end) throw Error("overlapping text edits");
  }
}

// Position of old offset `o` after the edits. Offsets inside an edit map to
// the end of its replacement.
size_t MapOffset(size_t o, const std::vector<TextEdit>& edits,
                 const std::vector<size_t>& new_lengths) {
  long long delta = 0;
  for (size_t i = 0; i < edits.size(); ++i) {
    const TextEdit& e = edits[i];
    if (o <= e.start) break;
    if (o >= e.end) {
      delta += static_cast<long long>(new_lengths[i]) - static_cast<long long>(e.end - e.start);
      continue;
    }
    return static_cast<size_t>(static_cast<long long>(e.start) + delta +
                               static_cast<long long>(new_lengths[i]));
  }
  return static_cast<size_t>(static_cast<long long>(o) + delta);
}

int GroupHead(const SentenceParse& parse, size_t first, size_t last, std::string* deprel) {
  for (size_t i = first; i < last; ++i) {
    const int h = parse.tokens[i].head;
    if (h == 0 || h - 1 < static_cast<int>(first) || h - 1 >= static_cast<int>(last)) {
      if (deprel) *deprel = parse.tokens[i].deprel;
      return static_cast<int>(i);
    }
  }
  if (deprel) *deprel = parse.tokens[first].deprel;
  return static_cast<int>(first);
}

}  // namespace

void ApplyTextEdits(Passage& passage, std::vector<TextEdit> edits) {
  if (edits.empty()) return;
  SortAndCheck(edits);
  const std::u32string text = DecodeUtf8(passage.text);
  if (edits.back().end > text.size()) throw Error("text edit beyond passage " + passage.pid);

  std::vector<size_t> new_lengths;
  std::u32string out;
  size_t cursor = 0;
  for (const TextEdit& e : edits) {
    out.append(text, cursor, e.start - cursor);
    const std::u32string repl = DecodeUtf8(e.replacement);
    out += repl;
    new_lengths.push_back(repl.size());
    cursor = e.end;
  }
  out.append(text, cursor, std::u32string::npos);

  std::vector<EntityMention> mentions;
  for (const EntityMention& m : passage.mentions) {
    const bool hit = std::any_of(edits.begin(), edits.end(), [&](const TextEdit& e) {
      return m.start < e.end && e.start < m.end;
    });
    if (hit) continue;
    mentions.push_back({MapOffset(m.start, edits, new_lengths),
                        MapOffset(m.end, edits, new_lengths), m.type});
  }
  for (size_t i = 0; i < edits.size(); ++i) {
    if (!edits[i].annotate || new_lengths[i] == 0) continue;
    const size_t start = MapOffset(edits[i].start, edits, new_lengths);
    mentions.push_back({start, start + new_lengths[i], *edits[i].annotate});
  }
  std::sort(mentions.begin(), mentions.end(),
            [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });

  for (SentenceParse& s : passage.sentences) {
    s.start = MapOffset(s.start, edits, new_lengths);
    s.end = MapOffset(s.end, edits, new_lengths);
  }
  passage.mentions = std::move(mentions);
  passage.text = EncodeUtf8(out);
}

void ApplyEditsWithRetokenization(Passage& passage, std::vector<TextEdit> edits) {
  if (edits.empty()) return;
  SortAndCheck(edits);
  const std::u32string text = DecodeUtf8(passage.text);

  for (SentenceParse& s : passage.sentences) {
    if (s.end > text.size()) continue;
    const auto rel = AlignTokens(std::u32string_view(text).substr(s.start, s.end - s.start),
                                 s.tokens);
    if (!rel) continue;
    std::vector<std::pair<size_t, size_t>> spans;
    for (const auto& [a, b] : *rel) spans.emplace_back(s.start + a, s.start + b);

    // Token groups [first, last) overlapping edits inside this sentence.
    struct Group {
      size_t first, last;
      std::vector<const TextEdit*> edits;
    };
    std::vector<Group> groups;
    for (const TextEdit& e : edits) {
      if (e.start < s.start || e.end > s.end) continue;
      size_t first = spans.size(), last = 0;
      for (size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].first < e.end && e.start < spans[i].second) {
          first = std::min(first, i);
          last = std::max(last, i + 1);
        }
      }
      if (first >= last) continue;
      if (!groups.empty() && first < groups.back().last) {
        groups.back().last = std::max(groups.back().last, last);
        groups.back().edits.push_back(&e);
      } else {
        groups.push_back({first, last, {&e}});
      }
    }

    for (auto g = groups.rbegin(); g != groups.rend(); ++g) {
      size_t region_start = spans[g->first].first;
      size_t region_end = spans[g->last - 1].second;
      for (const TextEdit* e : g->edits) {
        region_start = std::min(region_start, e->start);
        region_end = std::max(region_end, e->end);
      }
      std::u32string region;
      size_t cursor = region_start;
      for (const TextEdit* e : g->edits) {
        region.append(text, cursor, e->start - cursor);
        region += DecodeUtf8(e->replacement);
        cursor = e->end;
      }
      region.append(text, cursor, region_end - cursor);

      const std::vector<std::string> pieces = SplitWhitespace(EncodeUtf8(region));
      if (pieces.empty()) {
        // Nothing left to carry the group's relations; keep the parse as is.
        continue;
      }
      const int head = GroupHead(s, g->first, g->last, nullptr);
      const Token& head_token = s.tokens[head];
      std::vector<ReplacementToken> replacement;
      const size_t anchor = pieces.size() - 1;
      for (size_t k = 0; k < pieces.size(); ++k) {
        ReplacementToken r;
        r.token.form = pieces[k];
        r.token.lemma = pieces[k];
        r.token.xpos = head_token.xpos;
        if (k == anchor) {
          r.local_head = 0;
        } else {
          r.token.deprel = "compound";
          r.local_head = static_cast<int>(anchor) + 1;
        }
        replacement.push_back(std::move(r));
      }
      ReplaceTokenRange(s, g->first, g->last, replacement, anchor);
    }
  }
  ApplyTextEdits(passage, std::move(edits));
}

void ReplaceTokenRange(SentenceParse& parse, size_t first, size_t last,
                       const std::vector<ReplacementToken>& replacement, size_t anchor) {
  if (first >= last || last > parse.tokens.size() || replacement.empty() ||
      anchor >= replacement.size()) {
    throw Error("invalid token range replacement");
  }
  std::string group_deprel;
  const int group_head = GroupHead(parse, first, last, &group_deprel);
  const int external_head = parse.tokens[group_head].head;
  const long long shift =
      static_cast<long long>(replacement.size()) - static_cast<long long>(last - first);

  // Old 1-based head index -> new 1-based head index.
  auto remap = [&](int h) -> int {
    if (h == 0) return 0;
    if (h <= static_cast<int>(first)) return h;
    if (h > static_cast<int>(last)) return static_cast<int>(h + shift);
    return static_cast<int>(first + anchor + 1);
  };

  std::vector<Token> out;
  out.reserve(parse.tokens.size() + replacement.size());
  for (size_t i = 0; i < first; ++i) {
    Token t = parse.tokens[i];
    t.head = remap(t.head);
    out.push_back(std::move(t));
  }
  for (const ReplacementToken& r : replacement) {
    Token t = r.token;
    t.head = r.local_head == 0 ? remap(external_head)
                               : static_cast<int>(first) + r.local_head;
    if (t.deprel.empty()) t.deprel = group_deprel;
    out.push_back(std::move(t));
  }
  for (size_t i = last; i < parse.tokens.size(); ++i) {
    Token t = parse.tokens[i];
    t.head = remap(t.head);
    out.push_back(std::move(t));
  }
  parse.tokens = std::move(out);
}

}  // namespace kconflict
