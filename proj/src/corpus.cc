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

#include "kconflict/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "kconflict/error.h"
#include "kconflict/text.h"

namespace kconflict {

namespace {

constexpr std::pair<EntityType, std::string_view> kTypeNames[] = {
    {EntityType::kPerson, "person"},
    {EntityType::kDate, "date"},
    {EntityType::kNumeric, "numeric"},
    {EntityType::kOrganization, "organization"},
    {EntityType::kLocation, "location"},
    {EntityType::kOther, "other"},
};

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object()) throw DatasetError("record is not a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw DatasetError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string StringField(const Json& j, const char* key) {
  const Json& v = Field(j, key);
  if (!v.is_string()) {
    throw DatasetError(std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

double NumberField(const Json& j, const char* key) {
  const Json& v = Field(j, key);
  if (!v.is_number()) {
    throw DatasetError(std::string("field \"") + key + "\" must be a number");
  }
  return v.get<double>();
}

int64_t IntegerField(const Json& j, const char* key) {
  const Json& v = Field(j, key);
  if (!v.is_number_integer()) {
    throw DatasetError(std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<int64_t>();
}

size_t OffsetField(const Json& j, const char* key) {
  const int64_t v = IntegerField(j, key);
  if (v < 0) throw DatasetError(std::string("field \"") + key + "\" is negative");
  return static_cast<size_t>(v);
}

Token TokenFromJson(const Json& j) {
  Token t;
  t.form = StringField(j, "form");
  t.lemma = StringField(j, "lemma");
  t.xpos = StringField(j, "xpos");
  t.head = static_cast<int>(IntegerField(j, "head"));
  t.deprel = StringField(j, "deprel");
  return t;
}

std::string PassageLabel(const Passage& p) { return "passage " + p.pid; }

}  // namespace

std::string_view EntityTypeName(EntityType type) {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "other";
}

EntityType ParseEntityType(std::string_view name) {
  for (const auto& [t, n] : kTypeNames) {
    if (n == name) return t;
  }
  throw DatasetError("unknown entity type \"" + std::string(name) + "\"");
}

std::optional<size_t> SentenceParse::RootIndex() const {
  std::optional<size_t> root;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].deprel == "root") {
      if (root) return std::nullopt;
      root = i;
    }
  }
  return root;
}

const Passage* EvidenceSet::FindPassage(std::string_view pid) const {
  for (const Passage& p : passages) {
    if (p.pid == pid) return &p;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// EntityPool

void EntityPool::Add(EntityType type, std::string surface) {
  if (Trim(surface).empty()) return;
  entries_[type].push_back(std::move(surface));
}

const std::vector<std::string>& EntityPool::Entries(EntityType type) const {
  static const std::vector<std::string> kEmpty;
  auto it = entries_.find(type);
  return it == entries_.end() ? kEmpty : it->second;
}

size_t EntityPool::size() const {
  size_t n = 0;
  for (const auto& [type, values] : entries_) n += values.size();
  return n;
}

std::vector<std::string> EntityPool::NormalizedEntries() const {
  std::vector<std::string> all;
  for (const auto& [type, values] : entries_) {
    all.insert(all.end(), values.begin(), values.end());
  }
  return NormalizeAliases(all);
}

EntityPool BuildEntityPool(const std::vector<QuestionRecord>& training_questions) {
  EntityPool pool;
  for (const QuestionRecord& q : training_questions) {
    for (const std::string& alias : q.answers) pool.Add(q.answer_type, alias);
  }
  return pool;
}

// ---------------------------------------------------------------------------
// Mentions

std::string MentionText(const Passage& passage, const EntityMention& mention) {
  return SubstrCodePoints(passage.text, mention.start, mention.end);
}

std::vector<EntityMention> FindAnswerMentions(const Passage& passage,
                                              const std::vector<std::string>& answers,
                                              EntityType fallback_type) {
  const std::vector<std::string> normalized = NormalizeAliases(answers);
  if (normalized.empty()) return {};
  const std::u32string text = DecodeUtf8(passage.text);

  std::vector<EntityMention> found;
  for (const EntityMention& m : passage.mentions) {
    if (m.end > text.size() || m.start >= m.end) continue;
    const std::string covered =
        EncodeUtf8(std::u32string_view(text).substr(m.start, m.end - m.start));
    if (std::binary_search(normalized.begin(), normalized.end(),
                           NormalizeAnswer(covered))) {
      found.push_back(m);
    }
  }

  auto overlaps = [&found](size_t s, size_t e) {
    return std::any_of(found.begin(), found.end(), [&](const EntityMention& m) {
      return s < m.end && m.start < e;
    });
  };

  // Longer aliases first.
  std::vector<std::u32string> needles;
  for (const std::string& alias : answers) {
    const std::string trimmed = Trim(alias);
    if (NormalizeAnswer(trimmed).empty()) continue;
    std::u32string needle = DecodeUtf8(trimmed);
    for (char32_t& c : needle) c = ToLowerAscii(c);
    needles.push_back(std::move(needle));
  }
  std::stable_sort(needles.begin(), needles.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::u32string lowered = text;
  for (char32_t& c : lowered) c = ToLowerAscii(c);
  for (const std::u32string& needle : needles) {
    size_t pos = lowered.find(needle);
    while (pos != std::u32string::npos) {
      const size_t end = pos + needle.size();
      const bool left_ok = pos == 0 || !IsWordChar(lowered[pos - 1]) ||
                           !IsWordChar(needle.front());
      const bool right_ok = end == lowered.size() || !IsWordChar(lowered[end]) ||
                            !IsWordChar(needle.back());
      if (left_ok && right_ok && !overlaps(pos, end)) {
        found.push_back({pos, end, fallback_type});
      }
      pos = lowered.find(needle, pos + 1);
    }
  }
  std::sort(found.begin(), found.end(),
            [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });
  return found;
}

std::optional<std::vector<std::pair<size_t, size_t>>> AlignTokens(
    std::u32string_view sentence_text, const std::vector<Token>& tokens) {
  std::vector<std::pair<size_t, size_t>> spans;
  spans.reserve(tokens.size());
  size_t pos = 0;
  for (const Token& token : tokens) {
    const std::u32string form = DecodeUtf8(token.form);
    if (form.empty()) return std::nullopt;
    while (pos < sentence_text.size() && IsSpace(sentence_text[pos])) ++pos;
    if (sentence_text.substr(pos, form.size()) != form) return std::nullopt;
    spans.emplace_back(pos, pos + form.size());
    pos += form.size();
  }
  while (pos < sentence_text.size() && IsSpace(sentence_text[pos])) ++pos;
  if (pos != sentence_text.size()) return std::nullopt;
  return spans;
}

// ---------------------------------------------------------------------------
// JSON

Json ToJson(const QuestionRecord& q) {
  return Json{{"qid", q.qid},
              {"question", q.question},
              {"answers", q.answers},
              {"answer_type", std::string(EntityTypeName(q.answer_type))}};
}

Json ToJson(const Token& t) {
  return Json{{"form", t.form},
              {"lemma", t.lemma},
              {"xpos", t.xpos},
              {"head", t.head},
              {"deprel", t.deprel}};
}

Json ToJson(const SentenceParse& s) {
  Json tokens = Json::array();
  for (const Token& t : s.tokens) tokens.push_back(ToJson(t));
  return Json{{"start", s.start}, {"end", s.end}, {"tokens", std::move(tokens)}};
}

Json ToJson(const Passage& p) {
  Json entities = Json::array();
  for (const EntityMention& m : p.mentions) {
    entities.push_back(
        {{"start", m.start}, {"end", m.end}, {"type", std::string(EntityTypeName(m.type))}});
  }
  Json sentences = Json::array();
  for (const SentenceParse& s : p.sentences) sentences.push_back(ToJson(s));
  return Json{{"qid", p.qid},
              {"pid", p.pid},
              {"rank", p.rank},
              {"title", p.title},
              {"text", p.text},
              {"retrieval_score", p.retrieval_score},
              {"attention_score",
               p.attention_score ? Json(*p.attention_score) : Json(nullptr)},
              {"entities", std::move(entities)},
              {"sentences", std::move(sentences)}};
}

Json ToJson(const PredictionRecord& p) {
  return Json{{"qid", p.qid},
              {"prediction", p.prediction},
              {"gen_prob", p.gen_prob},
              {"encoder_features",
               p.encoder_features ? Json(*p.encoder_features) : Json(nullptr)}};
}

QuestionRecord QuestionFromJson(const Json& j) {
  QuestionRecord q;
  q.qid = StringField(j, "qid");
  q.question = StringField(j, "question");
  const Json& answers = Field(j, "answers");
  if (!answers.is_array()) throw DatasetError("field \"answers\" must be an array");
  for (const Json& a : answers) {
    if (!a.is_string()) throw DatasetError("answer aliases must be strings");
    q.answers.push_back(a.get<std::string>());
  }
  q.answer_type = ParseEntityType(StringField(j, "answer_type"));
  return q;
}

Passage PassageFromJson(const Json& j) {
  Passage p;
  p.qid = StringField(j, "qid");
  p.pid = StringField(j, "pid");
  p.rank = static_cast<int>(IntegerField(j, "rank"));
  p.title = StringField(j, "title");
  p.text = StringField(j, "text");
  p.retrieval_score = NumberField(j, "retrieval_score");
  if (auto it = j.find("attention_score"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw DatasetError("field \"attention_score\" must be a number or null");
    p.attention_score = it->get<double>();
  }
  if (auto it = j.find("entities"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DatasetError("field \"entities\" must be an array");
    for (const Json& e : *it) {
      p.mentions.push_back({OffsetField(e, "start"), OffsetField(e, "end"),
                            ParseEntityType(StringField(e, "type"))});
    }
  }
  if (auto it = j.find("sentences"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DatasetError("field \"sentences\" must be an array");
    for (const Json& s : *it) {
      SentenceParse parse;
      parse.start = OffsetField(s, "start");
      parse.end = OffsetField(s, "end");
      const Json& tokens = Field(s, "tokens");
      if (!tokens.is_array()) throw DatasetError("field \"tokens\" must be an array");
      for (const Json& t : tokens) parse.tokens.push_back(TokenFromJson(t));
      p.sentences.push_back(std::move(parse));
    }
  }
  return p;
}

PredictionRecord PredictionFromJson(const Json& j) {
  PredictionRecord p;
  p.qid = StringField(j, "qid");
  p.prediction = StringField(j, "prediction");
  p.gen_prob = NumberField(j, "gen_prob");
  if (auto it = j.find("encoder_features"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DatasetError("field \"encoder_features\" must be an array or null");
    std::vector<double> features;
    for (const Json& v : *it) {
      if (!v.is_number()) throw DatasetError("encoder features must be numbers");
      features.push_back(v.get<double>());
    }
    p.encoder_features = std::move(features);
  }
  return p;
}

std::vector<std::string> CheckQuestion(const QuestionRecord& q) {
  std::vector<std::string> problems;
  if (q.qid.empty()) problems.push_back("empty qid");
  if (q.answers.empty()) problems.push_back("question " + q.qid + ": no answers");
  for (const std::string& a : q.answers) {
    if (Trim(a).empty()) problems.push_back("question " + q.qid + ": empty answer alias");
  }
  return problems;
}

std::vector<std::string> CheckPassage(const Passage& p) {
  std::vector<std::string> problems;
  const std::string label = PassageLabel(p);
  std::u32string text;
  try {
    text = DecodeUtf8(p.text);
  } catch (const DatasetError& e) {
    problems.push_back(label + ": " + e.what());
    return problems;
  }
  if (p.rank < 1) problems.push_back(label + ": rank must be >= 1");
  if (!std::isfinite(p.retrieval_score)) problems.push_back(label + ": non-finite retrieval_score");
  if (p.attention_score && !std::isfinite(*p.attention_score)) {
    problems.push_back(label + ": non-finite attention_score");
  }

  std::vector<EntityMention> sorted = p.mentions;
  for (const EntityMention& m : sorted) {
    if (m.start >= m.end || m.end > text.size()) {
      problems.push_back(label + ": entity offset [" + std::to_string(m.start) + ", " +
                         std::to_string(m.end) + ") out of bounds for text length " +
                         std::to_string(text.size()));
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start < sorted[i - 1].end) {
      problems.push_back(label + ": overlapping entities at offset " +
                         std::to_string(sorted[i].start));
    }
  }

  for (size_t si = 0; si < p.sentences.size(); ++si) {
    const SentenceParse& s = p.sentences[si];
    const std::string where = label + ": sentence " + std::to_string(si);
    if (s.start > s.end || s.end > text.size()) {
      problems.push_back(where + " offset [" + std::to_string(s.start) + ", " +
                         std::to_string(s.end) + ") out of bounds for text length " +
                         std::to_string(text.size()));
      continue;
    }
    size_t roots = 0;
    for (const Token& t : s.tokens) {
      if (t.deprel == "root") {
        ++roots;
        if (t.head != 0) problems.push_back(where + ": root token has non-zero head");
      }
      if (t.head < 0 || t.head > static_cast<int>(s.tokens.size())) {
        problems.push_back(where + ": head index " + std::to_string(t.head) + " out of range");
      }
    }
    if (roots != 1) {
      problems.push_back(where + ": expected exactly one root, found " + std::to_string(roots));
    }
    const auto sentence_text = std::u32string_view(text).substr(s.start, s.end - s.start);
    if (!AlignTokens(sentence_text, s.tokens)) {
      problems.push_back(where + ": tokens do not tile the sentence text");
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Files

std::string FormatFinding(const Finding& f) {
  std::string out = f.file;
  if (f.line > 0) out += ":" + std::to_string(f.line);
  if (!out.empty()) out += ": ";
  return out + f.message;
}

const QuestionRecord* Dataset::FindQuestion(std::string_view qid) const {
  auto it = question_index.find(std::string(qid));
  return it == question_index.end() ? nullptr : &questions[it->second];
}

const EvidenceSet* Dataset::FindEvidence(std::string_view qid) const {
  auto it = evidence.find(std::string(qid));
  return it == evidence.end() ? nullptr : &it->second;
}

namespace {

// Calls `fn(json, line_number)` for every non-blank line; malformed lines and
// exceptions thrown by `fn` become findings.
template <typename Fn>
void ForEachJsonLine(const std::filesystem::path& path, std::vector<Finding>& findings,
                     Fn fn) {
  std::ifstream in(path);
  if (!in) {
    findings.push_back({path.string(), 0, "cannot open file"});
    return;
  }
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      findings.push_back({path.string(), line_no, std::string("malformed JSON: ") + e.what()});
      continue;
    }
    try {
      fn(j, line_no);
    } catch (const DatasetError& e) {
      findings.push_back({path.string(), line_no, e.what()});
    } catch (const Json::exception& e) {
      findings.push_back({path.string(), line_no, e.what()});
    }
  }
}

Dataset LoadInternal(const DatasetPaths& paths, std::vector<Finding>& findings) {
  Dataset ds;
  const std::string qfile = paths.questions.string();
  ForEachJsonLine(paths.questions, findings, [&](const Json& j, size_t line) {
    QuestionRecord q = QuestionFromJson(j);
    for (const std::string& problem : CheckQuestion(q)) {
      findings.push_back({qfile, line, problem});
    }
    if (ds.question_index.count(q.qid)) {
      findings.push_back({qfile, line, "duplicate qid " + q.qid});
      return;
    }
    ds.question_index[q.qid] = ds.questions.size();
    ds.questions.push_back(std::move(q));
  });

  const std::string pfile = paths.passages.string();
  std::map<std::string, std::set<std::string>> pids;
  ForEachJsonLine(paths.passages, findings, [&](const Json& j, size_t line) {
    Passage p = PassageFromJson(j);
    for (const std::string& problem : CheckPassage(p)) {
      findings.push_back({pfile, line, problem});
    }
    if (!ds.question_index.count(p.qid)) {
      findings.push_back({pfile, line, "dangling reference: passage " + p.pid +
                                           " refers to unknown qid " + p.qid});
      return;
    }
    if (!pids[p.qid].insert(p.pid).second) {
      findings.push_back({pfile, line, "duplicate pid " + p.pid + " for qid " + p.qid});
      return;
    }
    EvidenceSet& set = ds.evidence[p.qid];
    set.qid = p.qid;
    set.passages.push_back(std::move(p));
  });
  for (auto& [qid, set] : ds.evidence) {
    std::stable_sort(set.passages.begin(), set.passages.end(),
                     [](const Passage& a, const Passage& b) { return a.rank < b.rank; });
    for (size_t i = 0; i < set.passages.size(); ++i) {
      if (set.passages[i].rank != static_cast<int>(i + 1)) {
        findings.push_back({pfile, 0, "ranks for qid " + qid + " are not a permutation of 1.." +
                                          std::to_string(set.passages.size())});
        break;
      }
    }
  }

  if (paths.predictions) {
    const std::string rfile = paths.predictions->string();
    std::optional<size_t> dims;
    ForEachJsonLine(*paths.predictions, findings, [&](const Json& j, size_t line) {
      PredictionRecord p = PredictionFromJson(j);
      if (!(p.gen_prob >= 0.0 && p.gen_prob <= 1.0)) {
        findings.push_back({rfile, line, "gen_prob outside [0, 1] for qid " + p.qid});
      }
      if (p.encoder_features) {
        if (!dims) dims = p.encoder_features->size();
        if (*dims != p.encoder_features->size()) {
          findings.push_back({rfile, line, "encoder_features has dimension " +
                                               std::to_string(p.encoder_features->size()) +
                                               ", expected " + std::to_string(*dims)});
        }
      }
      if (!ds.question_index.count(p.qid)) {
        findings.push_back({rfile, line, "dangling reference: prediction refers to unknown qid " +
                                             p.qid});
        return;
      }
      if (ds.predictions.count(p.qid)) {
        findings.push_back({rfile, line, "duplicate prediction for qid " + p.qid});
        return;
      }
      ds.predictions[p.qid] = std::move(p);
    });
  }
  return ds;
}

}  // namespace

std::vector<Finding> ValidateDataset(const DatasetPaths& paths) {
  std::vector<Finding> findings;
  LoadInternal(paths, findings);
  return findings;
}

Dataset LoadDataset(const DatasetPaths& paths) {
  std::vector<Finding> findings;
  Dataset ds = LoadInternal(paths, findings);
  if (!findings.empty()) throw DatasetError(FormatFinding(findings.front()));
  return ds;
}

std::vector<Json> ReadJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError(path.string() + ": cannot open file");
  std::vector<Json> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw DatasetError(path.string() + ":" + std::to_string(line_no) +
                         ": malformed JSON: " + e.what());
    }
  }
  return rows;
}

void WriteJsonl(const std::filesystem::path& path, const std::vector<Json>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError(path.string() + ": cannot write file");
  for (const Json& row : rows) out << row.dump() << '\n';
}

namespace {

template <typename T, typename Parse>
std::vector<T> LoadRecords(const std::filesystem::path& path, Parse parse) {
  std::vector<T> out;
  size_t index = 0;
  for (const Json& j : ReadJsonl(path)) {
    ++index;
    try {
      out.push_back(parse(j));
    } catch (const DatasetError& e) {
      throw DatasetError(path.string() + ": record " + std::to_string(index) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<QuestionRecord> LoadQuestions(const std::filesystem::path& path) {
  return LoadRecords<QuestionRecord>(path, QuestionFromJson);
}

std::vector<PredictionRecord> LoadPredictions(const std::filesystem::path& path) {
  return LoadRecords<PredictionRecord>(path, PredictionFromJson);
}

std::map<std::string, EvidenceSet> LoadEvidence(const std::filesystem::path& path) {
  std::map<std::string, EvidenceSet> sets;
  for (Passage& p : LoadRecords<Passage>(path, PassageFromJson)) {
    EvidenceSet& set = sets[p.qid];
    set.qid = p.qid;
    set.passages.push_back(std::move(p));
  }
  for (auto& [qid, set] : sets) {
    std::stable_sort(set.passages.begin(), set.passages.end(),
                     [](const Passage& a, const Passage& b) { return a.rank < b.rank; });
  }
  return sets;
}

void WriteQuestions(const std::filesystem::path& path,
                    const std::vector<QuestionRecord>& questions) {
  std::vector<Json> rows;
  for (const QuestionRecord& q : questions) rows.push_back(ToJson(q));
  WriteJsonl(path, rows);
}

void WriteEvidence(const std::filesystem::path& path, const std::vector<EvidenceSet>& sets) {
  std::vector<Json> rows;
  for (const EvidenceSet& set : sets) {
    for (const Passage& p : set.passages) rows.push_back(ToJson(p));
  }
  WriteJsonl(path, rows);
}

void WritePredictions(const std::filesystem::path& path,
                      const std::vector<PredictionRecord>& predictions) {
  std::vector<Json> rows;
  for (const PredictionRecord& p : predictions) rows.push_back(ToJson(p));
  WriteJsonl(path, rows);
}

// ---------------------------------------------------------------------------
// CoNLL-U

std::vector<ConlluSentence> ParseConllu(std::string_view text) {
  std::vector<ConlluSentence> sentences;
  ConlluSentence current;
  std::string pid;
  auto flush = [&] {
    if (!current.tokens.empty()) {
      current.pid = pid;
      sentences.push_back(std::move(current));
    }
    current = ConlluSentence{};
  };
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      const std::string body = Trim(std::string_view(line).substr(1));
      if (body.rfind("pid", 0) == 0) {
        const size_t eq = body.find('=');
        if (eq != std::string::npos) pid = Trim(std::string_view(body).substr(eq + 1));
      }
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 10) {
      throw DatasetError("CoNLL-U line " + std::to_string(line_no) + ": expected 10 columns");
    }
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    Token t;
    t.form = cols[1];
    t.lemma = cols[2] == "_" ? "" : cols[2];
    t.xpos = cols[4] == "_" ? "" : cols[4];
    try {
      t.head = std::stoi(cols[6]);
    } catch (const std::exception&) {
      throw DatasetError("CoNLL-U line " + std::to_string(line_no) + ": bad HEAD");
    }
    t.deprel = cols[7];
    current.tokens.push_back(std::move(t));
  }
  flush();
  return sentences;
}

void AttachSentences(Passage& passage, const std::vector<std::vector<Token>>& sentences) {
  const std::u32string text = DecodeUtf8(passage.text);
  std::vector<SentenceParse> parsed;
  size_t cursor = 0;
  for (const std::vector<Token>& tokens : sentences) {
    if (tokens.empty()) continue;
    const std::u32string first = DecodeUtf8(tokens.front().form);
    bool placed = false;
    for (size_t start = text.find(first, cursor); start != std::u32string::npos;
         start = text.find(first, start + 1)) {
      size_t pos = start;
      bool ok = true;
      for (const Token& t : tokens) {
        const std::u32string form = DecodeUtf8(t.form);
        while (pos < text.size() && IsSpace(text[pos])) ++pos;
        if (std::u32string_view(text).substr(pos, form.size()) != form) {
          ok = false;
          break;
        }
        pos += form.size();
      }
      if (!ok) continue;
      parsed.push_back({start, pos, tokens});
      cursor = pos;
      placed = true;
      break;
    }
    if (!placed) {
      throw DatasetError("passage " + passage.pid + ": cannot align sentence starting with \"" +
                         tokens.front().form + "\"");
    }
  }
  passage.sentences = std::move(parsed);
}

}  // namespace kconflict
