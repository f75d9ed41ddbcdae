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

#include "kconflict/toy_corpus.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "kconflict/error.h"
#include "kconflict/rng.h"
#include "kconflict/text.h"

namespace kconflict {

namespace {

// Templates are space-separated "form|lemma|xpos|head|deprel" tokens. Slot
// tokens ({A} answer, {T} topic) leave the lemma empty and may expand to
// several words.
struct TypeSpec {
  EntityType type;
  const char* question;  // "%T" is replaced by the topic
  std::vector<const char*> templates;
};

const std::vector<TypeSpec>& Specs() {
  static const std::vector<TypeSpec> specs = {
      {EntityType::kDate,
       "When did %T open?",
       {
           "{T}||NNP|2|nsubj opened|open|VBD|0|root in|in|IN|4|case {A}||CD|2|obl .|.|.|2|punct",
           "{T}||NNP|3|nsubj has|have|VBZ|3|aux operated|operate|VBN|0|root "
           "since|since|IN|5|case {A}||CD|3|obl .|.|.|3|punct",
           "{T}||NNP|2|nsubj is|be|VBZ|0|root the|the|DT|4|det landmark|landmark|NN|2|attr "
           "built|build|VBN|4|acl in|in|IN|7|case {A}||CD|5|obl .|.|.|2|punct",
           "Opening|opening|NN|2|compound year|year|NN|0|root of|of|IN|4|case "
           "{T}||NNP|2|nmod :|:|:|2|punct {A}||CD|2|appos .|.|.|2|punct",
           "Records|record|NNS|2|nsubj date|date|VBP|0|root {T}||NNP|2|obj to|to|IN|5|case "
           "{A}||CD|2|obl .|.|.|2|punct",
           "{T}||NNP|2|nsubj marks|mark|VBZ|0|root {A}||CD|2|obj as|as|IN|7|case "
           "its|its|PRP$|7|nmod:poss founding|founding|NN|7|compound year|year|NN|2|obl "
           ".|.|.|2|punct",
           "Crews|crew|NNS|3|nsubj were|be|VBD|3|aux finishing|finish|VBG|0|root "
           "{T}||NNP|3|obj in|in|IN|6|case {A}||CD|3|obl .|.|.|3|punct",
           "Visit|visit|VB|0|root {T}||NNP|1|obj ,|,|,|1|punct open|open|JJ|1|advcl "
           "since|since|IN|6|case {A}||CD|4|obl .|.|.|1|punct",
           "{T}||NNP|3|nsubj may|may|MD|3|aux reopen|reopen|VB|0|root in|in|IN|5|case "
           "{A}||CD|3|obl .|.|.|3|punct",
       }},
      {EntityType::kPerson,
       "Who designed %T?",
       {
           "{A}||NNP|2|nsubj designed|design|VBD|0|root {T}||NNP|2|obj .|.|.|2|punct",
           "{A}||NNP|3|nsubj has|have|VBZ|3|aux managed|manage|VBN|0|root {T}||NNP|3|obj "
           "for|for|IN|6|case years|year|NNS|3|obl .|.|.|3|punct",
           "{A}||NNP|2|nsubj is|be|VBZ|0|root the|the|DT|4|det architect|architect|NN|2|attr "
           "of|of|IN|6|case {T}||NNP|4|nmod .|.|.|2|punct",
           "Architect|architect|NN|0|root of|of|IN|3|case {T}||NNP|1|nmod :|:|:|1|punct "
           "{A}||NNP|1|appos .|.|.|1|punct",
           "Guides|guide|NNS|2|nsubj credit|credit|VBP|0|root {A}||NNP|2|obj "
           "with|with|IN|5|case {T}||NNP|2|obl .|.|.|2|punct",
           "{A}||NNP|2|nsubj oversees|oversee|VBZ|0|root {T}||NNP|2|obj .|.|.|2|punct",
           "{A}||NNP|3|nsubj was|be|VBD|3|aux restoring|restore|VBG|0|root {T}||NNP|3|obj "
           ".|.|.|3|punct",
       }},
      {EntityType::kOrganization,
       "Which company owns %T?",
       {
           "{A}||NNP|2|nsubj acquired|acquire|VBD|0|root {T}||NNP|2|obj .|.|.|2|punct",
           "{A}||NNP|3|nsubj has|have|VBZ|3|aux owned|own|VBN|0|root {T}||NNP|3|obj "
           "since|since|IN|7|case the|the|DT|7|det war|war|NN|3|obl .|.|.|3|punct",
           "{A}||NNP|2|nsubj is|be|VBZ|0|root the|the|DT|4|det owner|owner|NN|2|attr "
           "of|of|IN|6|case {T}||NNP|4|nmod .|.|.|2|punct",
           "Owner|owner|NN|0|root of|of|IN|3|case {T}||NNP|1|nmod :|:|:|1|punct "
           "{A}||NNP|1|appos .|.|.|1|punct",
           "Records|record|NNS|2|nsubj list|list|VBP|0|root {A}||NNP|2|obj as|as|IN|5|case "
           "owner|owner|NN|2|obl of|of|IN|7|case {T}||NNP|5|nmod .|.|.|2|punct",
           "{A}||NNP|2|nsubj operates|operate|VBZ|0|root {T}||NNP|2|obj .|.|.|2|punct",
           "{A}||NNP|3|nsubj was|be|VBD|3|aux running|run|VBG|0|root {T}||NNP|3|obj "
           ".|.|.|3|punct",
       }},
      {EntityType::kLocation,
       "Where is %T?",
       {
           "{T}||NNP|2|nsubj stood|stand|VBD|0|root in|in|IN|4|case {A}||NNP|2|obl .|.|.|2|punct",
           "{T}||NNP|3|nsubj has|have|VBZ|3|aux remained|remain|VBN|0|root in|in|IN|5|case "
           "{A}||NNP|3|obl .|.|.|3|punct",
           "{T}||NNP|2|nsubj is|be|VBZ|0|root in|in|IN|4|case {A}||NNP|2|obl .|.|.|2|punct",
           "Location|location|NN|0|root of|of|IN|3|case {T}||NNP|1|nmod :|:|:|1|punct "
           "{A}||NNP|1|appos .|.|.|1|punct",
           "Maps|map|NNS|2|nsubj place|place|VBP|0|root {T}||NNP|2|obj in|in|IN|5|case "
           "{A}||NNP|2|obl .|.|.|2|punct",
           "{T}||NNP|2|nsubj lies|lie|VBZ|0|root in|in|IN|4|case {A}||NNP|2|obl .|.|.|2|punct",
           "Visitors|visitor|NNS|3|nsubj are|be|VBP|3|aux reaching|reach|VBG|0|root "
           "{T}||NNP|3|obj in|in|IN|6|case {A}||NNP|3|obl .|.|.|3|punct",
       }},
      {EntityType::kNumeric,
       "How many rooms does %T have?",
       {
           "{T}||NNP|2|nsubj counted|count|VBD|0|root {A}||CD|4|nummod rooms|room|NNS|2|obj "
           ".|.|.|2|punct",
           "{T}||NNP|3|nsubj has|have|VBZ|3|aux housed|house|VBN|0|root {A}||CD|5|nummod "
           "rooms|room|NNS|3|obj .|.|.|3|punct",
           "{T}||NNP|2|nsubj is|be|VBZ|0|root home|home|NN|2|attr to|to|IN|6|case "
           "{A}||CD|6|nummod rooms|room|NNS|3|nmod .|.|.|2|punct",
           "Room|room|NN|2|compound count|count|NN|0|root of|of|IN|4|case {T}||NNP|2|nmod "
           ":|:|:|2|punct {A}||CD|2|appos .|.|.|2|punct",
           "Surveys|survey|NNS|2|nsubj give|give|VBP|0|root {T}||NNP|2|iobj "
           "{A}||CD|5|nummod rooms|room|NNS|2|obj .|.|.|2|punct",
           "{T}||NNP|2|nsubj contains|contain|VBZ|0|root {A}||CD|4|nummod "
           "rooms|room|NNS|2|obj .|.|.|2|punct",
           "{T}||NNP|3|nsubj was|be|VBD|3|aux adding|add|VBG|0|root {A}||CD|5|nummod "
           "rooms|room|NNS|3|obj .|.|.|3|punct",
       }},
      {EntityType::kOther,
       "What material was used for %T?",
       {
           "Builders|builder|NNS|2|nsubj chose|choose|VBD|0|root {A}||NN|2|obj "
           "for|for|IN|5|case {T}||NNP|2|obl .|.|.|2|punct",
           "{T}||NNP|2|nsubj is|be|VBZ|0|root made|make|VBN|2|xcomp of|of|IN|5|case "
           "{A}||NN|3|obl .|.|.|2|punct",
           "Material|material|NN|0|root of|of|IN|3|case {T}||NNP|1|nmod :|:|:|1|punct "
           "{A}||NN|1|appos .|.|.|1|punct",
       }},
  };
  return specs;
}

const std::vector<const char*> kFillers = {
    "{T}||NNP|2|nsubj attracts|attract|VBZ|0|root many|many|JJ|4|amod "
    "visitors|visitor|NNS|2|obj .|.|.|2|punct",
    "Tours|tour|NNS|4|nsubj of|of|IN|3|case {T}||NNP|1|nmod run|run|VBP|0|root "
    "daily|daily|RB|4|advmod .|.|.|4|punct",
    "Local|local|JJ|2|amod guides|guide|NNS|3|nsubj praised|praise|VBD|0|root the|the|DT|5|det "
    "site|site|NN|3|obj .|.|.|3|punct",
    "The|the|DT|2|det building|building|NN|3|nsubj draws|draw|VBZ|0|root steady|steady|JJ|5|amod "
    "crowds|crowd|NNS|3|obj .|.|.|3|punct",
    "Photographs|photograph|NNS|3|nsubj have|have|VBP|3|aux shown|show|VBN|0|root "
    "{T}||NNP|3|obj at|at|IN|6|case night|night|NN|3|obl .|.|.|3|punct",
};

const std::vector<std::string> kFirstNames = {"Ada",   "Boris", "Clara", "Dmitri", "Elena",
                                              "Felix", "Greta", "Hugo",  "Ines",   "Jonas",
                                              "Kira",  "Leon",  "Mara",  "Nils",   "Olga",
                                              "Pavel", "Rosa",  "Stefan", "Tilda", "Viktor"};
const std::vector<std::string> kSurnames = {"Lovell", "Quill",  "Marsh",    "Brandt",  "Castell",
                                            "Dunmore", "Everly", "Fairbank", "Garrow", "Holt",
                                            "Ingram", "Jessop", "Kettle",   "Lark",    "Morrow",
                                            "Norcott", "Orme",  "Pryce",    "Rook",    "Sallow"};
const std::vector<std::string> kOrgHeads = {"Northwind", "Bluefield", "Ironvale",  "Silverline",
                                            "Redwater",  "Oakridge",  "Stonegate", "Clearbrook",
                                            "Highmoor",  "Easthaven", "Westmarch", "Goldcrest"};
const std::vector<std::string> kOrgTails = {"Trading", "Holdings", "Partners",
                                            "Group",   "Trust",    "Works"};
const std::vector<std::string> kPlaceHeads = {"Port", "Lake", "Mount", "Fort", "Glen", "Cape"};
const std::vector<std::string> kPlaceTails = {"Alden", "Brisk",  "Corran", "Delwyn", "Esker",
                                              "Farrow", "Gilden", "Harrow", "Istel", "Jorvik"};
const std::vector<std::string> kMaterialColors = {"red",   "white", "grey", "yellow",
                                                  "black", "pink",  "green"};
const std::vector<std::string> kMaterials = {"granite", "marble", "slate", "sandstone", "basalt"};
const std::vector<std::string> kTopicHeads = {"Harbor", "Alder",   "Crown",   "Marlow",
                                              "Beacon", "Cedar",   "Falcon",  "Heron",
                                              "Juniper", "Lantern", "Meridian", "Orchid",
                                              "Saffron", "Thistle"};
const std::vector<std::string> kTopicTails = {"Bridge", "Library", "Theater", "Observatory",
                                              "Museum"};

std::vector<std::string> Cross(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  std::vector<std::string> out;
  for (const std::string& x : a) {
    for (const std::string& y : b) out.push_back(x + " " + y);
  }
  return out;
}

std::vector<std::string> Values(EntityType type) {
  std::vector<std::string> out;
  switch (type) {
    case EntityType::kPerson:
      return Cross(kFirstNames, kSurnames);
    case EntityType::kOrganization:
      return Cross(kOrgHeads, kOrgTails);
    case EntityType::kLocation:
      return Cross(kPlaceHeads, kPlaceTails);
    case EntityType::kDate:
      for (int y = 1900; y <= 1999; ++y) out.push_back(std::to_string(y));
      return out;
    case EntityType::kNumeric:
      // Never a substring of a year.
      for (int n = 500; n <= 899; ++n) out.push_back(std::to_string(n));
      return out;
    case EntityType::kOther:
      return Cross(kMaterialColors, kMaterials);
  }
  return out;
}

// Values of one type split into disjoint test, train and distractor parts.
struct ValueBank {
  std::vector<std::string> test, train, distract;
  size_t next_test = 0, next_distract = 0;

  std::string Test() { return test[next_test++ % test.size()]; }
  std::string Distract() { return distract[next_distract++ % distract.size()]; }
};

ValueBank MakeBank(EntityType type, Rng& rng) {
  std::vector<std::string> v = Values(type);
  rng.Shuffle(v);
  ValueBank bank;
  const size_t third = v.size() / 3;
  bank.test.assign(v.begin(), v.begin() + third);
  bank.train.assign(v.begin() + third, v.begin() + 2 * third);
  bank.distract.assign(v.begin() + 2 * third, v.end());
  return bank;
}

double Round4(double x) { return std::round(x * 10000.0) / 10000.0; }

bool AttachesLeft(const std::string& form) { return form == "." || form == "," || form == ":"; }

struct BuiltSentence {
  std::string text;
  std::vector<Token> tokens;
  std::vector<std::pair<size_t, size_t>> answer_spans;  // code points, sentence-relative
};

BuiltSentence BuildSentence(const std::string& tmpl, const std::string& topic,
                            const std::string& answer) {
  struct Raw {
    std::string form, lemma, xpos, deprel;
    int head;
    bool slot_answer;
    bool slot;
  };
  std::vector<Raw> raw;
  for (const std::string& field : SplitWhitespace(tmpl)) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i <= field.size(); ++i) {
      if (i == field.size() || field[i] == '|') {
        parts.push_back(field.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() != 5) throw Error("bad toy template token: " + field);
    const bool is_answer = parts[0] == "{A}";
    const bool is_slot = is_answer || parts[0] == "{T}";
    raw.push_back({parts[0], parts[1], parts[2], parts[4], std::stoi(parts[3]), is_answer, is_slot});
  }
  // Expand slots; the last word of a slot keeps the slot's attachment.
  std::vector<int> last_index(raw.size());
  std::vector<std::vector<std::string>> words(raw.size());
  int count = 0;
  for (size_t i = 0; i < raw.size(); ++i) {
    words[i] = raw[i].slot ? SplitWhitespace(raw[i].slot_answer ? answer : topic)
                           : std::vector<std::string>{raw[i].form};
    count += static_cast<int>(words[i].size());
    last_index[i] = count;  // 1-based
  }
  BuiltSentence out;
  size_t offset = 0;
  for (size_t i = 0; i < raw.size(); ++i) {
    size_t span_start = 0;
    for (size_t w = 0; w < words[i].size(); ++w) {
      Token t;
      t.form = words[i][w];
      t.lemma = raw[i].slot ? words[i][w] : raw[i].lemma;
      t.xpos = raw[i].xpos;
      if (w + 1 == words[i].size()) {
        t.head = raw[i].head == 0 ? 0 : last_index[raw[i].head - 1];
        t.deprel = raw[i].deprel;
      } else {
        t.head = last_index[i];
        t.deprel = "compound";
      }
      if (!out.text.empty() && !AttachesLeft(t.form)) {
        out.text += ' ';
        ++offset;
      }
      if (w == 0) span_start = offset;
      out.text += t.form;
      offset += CodePointLength(t.form);
      out.tokens.push_back(std::move(t));
    }
    if (raw[i].slot_answer) out.answer_spans.emplace_back(span_start, offset);
  }
  // Sentence-initial words are capitalized.
  if (!out.tokens.empty() && out.text[0] >= 'a' && out.text[0] <= 'z') {
    out.text[0] = static_cast<char>(out.text[0] - 32);
    out.tokens[0].form[0] = out.text[0];
  }
  return out;
}

// Joins sentences into a passage; `types[i]` annotates the answer slots of
// sentence i (nullopt leaves them unannotated).
Passage BuildPassage(const std::string& qid, const std::string& pid, const std::string& title,
                     const std::vector<BuiltSentence>& sentences,
                     const std::vector<std::optional<EntityType>>& types) {
  Passage p;
  p.qid = qid;
  p.pid = pid;
  p.title = title;
  size_t offset = 0;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) {
      p.text += ' ';
      ++offset;
    }
    const BuiltSentence& s = sentences[i];
    SentenceParse parse;
    parse.start = offset;
    parse.end = offset + CodePointLength(s.text);
    parse.tokens = s.tokens;
    p.sentences.push_back(std::move(parse));
    if (types[i]) {
      for (const auto& [a, b] : s.answer_spans) {
        p.mentions.push_back({offset + a, offset + b, *types[i]});
      }
    }
    p.text += s.text;
    offset = p.sentences.back().end;
  }
  return p;
}

const TypeSpec& SpecFor(EntityType type) {
  for (const TypeSpec& s : Specs()) {
    if (s.type == type) return s;
  }
  throw Error("no toy templates for type");
}

std::string Question(const TypeSpec& spec, const std::string& topic) {
  std::string q = spec.question;
  q.replace(q.find("%T"), 2, topic);
  return q;
}

// A passage stating `value` once or twice, plus filler.
Passage ValuePassage(Rng& rng, const TypeSpec& spec, const std::string& qid,
                     const std::string& pid, const std::string& topic, const std::string& value) {
  std::vector<BuiltSentence> sentences;
  std::vector<std::optional<EntityType>> types;
  const size_t n = spec.templates.size();
  const size_t first = rng.UniformIndex(n);
  sentences.push_back(BuildSentence(spec.templates[first], topic, value));
  types.push_back(spec.type);
  if (rng.UniformReal() < 0.35) {
    const size_t second = (first + 1 + rng.UniformIndex(n - 1)) % n;
    sentences.push_back(BuildSentence(spec.templates[second], topic, value));
    types.push_back(spec.type);
  }
  if (rng.UniformReal() < 0.6) {
    const size_t at = rng.UniformIndex(sentences.size() + 1);
    sentences.insert(sentences.begin() + static_cast<long>(at),
                     BuildSentence(kFillers[rng.UniformIndex(kFillers.size())], topic, ""));
    types.insert(types.begin() + static_cast<long>(at), std::nullopt);
  }
  return BuildPassage(qid, pid, topic, sentences, types);
}

Passage FillerPassage(Rng& rng, const std::string& qid, const std::string& pid,
                      const std::string& topic) {
  std::vector<BuiltSentence> sentences;
  std::vector<std::optional<EntityType>> types;
  const size_t count = 1 + rng.UniformIndex(2);
  const size_t first = rng.UniformIndex(kFillers.size());
  for (size_t i = 0; i < count; ++i) {
    sentences.push_back(BuildSentence(kFillers[(first + i) % kFillers.size()], topic, ""));
    types.push_back(std::nullopt);
  }
  return BuildPassage(qid, pid, topic, sentences, types);
}

double Uniform(Rng& rng, double lo, double hi) { return Round4(lo + (hi - lo) * rng.UniformReal()); }

std::string TwoDigits(int k) { return (k < 10 ? "0" : "") + std::to_string(k); }

// Assigns pids in shuffled order and ranks by retrieval score.
EvidenceSet Finalize(Rng& rng, const std::string& qid, const std::string& prefix,
                     std::vector<Passage> passages) {
  std::vector<int> ids(passages.size());
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  rng.Shuffle(ids);
  for (size_t i = 0; i < passages.size(); ++i) passages[i].pid = qid + prefix + TwoDigits(ids[i]);
  std::sort(passages.begin(), passages.end(), [](const Passage& a, const Passage& b) {
    return a.retrieval_score != b.retrieval_score ? a.retrieval_score > b.retrieval_score
                                                  : a.pid < b.pid;
  });
  for (size_t i = 0; i < passages.size(); ++i) passages[i].rank = static_cast<int>(i + 1);
  return {qid, std::move(passages)};
}

}  // namespace

ToyCorpus MakeToyCorpus(const ToyOptions& options) {
  Rng rng(options.seed);
  std::map<EntityType, ValueBank> banks;
  for (const TypeSpec& spec : Specs()) banks[spec.type] = MakeBank(spec.type, rng);
  std::vector<std::string> topics = Cross(kTopicHeads, kTopicTails);
  rng.Shuffle(topics);
  size_t next_topic = 0;

  std::vector<EntityType> plan;
  const EntityType typed[] = {EntityType::kDate, EntityType::kPerson, EntityType::kOrganization,
                              EntityType::kLocation, EntityType::kNumeric};
  for (int i = 0; i < options.questions_per_type; ++i) {
    for (EntityType t : typed) plan.push_back(t);
  }
  for (int i = 0; i < options.other_questions; ++i) plan.push_back(EntityType::kOther);

  ToyCorpus corpus;
  for (size_t qi = 0; qi < plan.size(); ++qi) {
    const TypeSpec& spec = SpecFor(plan[qi]);
    ValueBank& bank = banks[spec.type];
    const std::string qid = "toy-" + std::string(qi < 9 ? "00" : qi < 99 ? "0" : "") +
                            std::to_string(qi + 1);
    const std::string topic = topics[next_topic++ % topics.size()];
    const std::string answer = bank.Test();
    corpus.questions.push_back({qid, Question(spec, topic), {answer}, spec.type});

    std::vector<std::string> distractors;
    while (distractors.size() < 4) {
      const std::string d = bank.Distract();
      if (std::find(distractors.begin(), distractors.end(), d) == distractors.end()) {
        distractors.push_back(d);
      }
    }

    const int total = options.passages_per_question;
    const int answer_count = 4 + static_cast<int>(rng.UniformIndex(5));
    const int distract_count = 3 + static_cast<int>(rng.UniformIndex(3));
    std::vector<Passage> passages;
    for (int k = 0; k < total; ++k) {
      Passage p;
      if (k < answer_count) {
        p = ValuePassage(rng, spec, qid, "", topic, answer);
        p.attention_score = Uniform(rng, 0.55, 1.0);
        p.retrieval_score = Uniform(rng, 60, 80);
      } else if (k < answer_count + distract_count) {
        p = ValuePassage(rng, spec, qid, "", topic, distractors[k % 2]);
        p.attention_score = Uniform(rng, 0.25, 0.6);
        p.retrieval_score = Uniform(rng, 55, 75);
      } else {
        p = FillerPassage(rng, qid, "", topic);
        p.attention_score = Uniform(rng, 0.0, 0.3);
        p.retrieval_score = Uniform(rng, 50, 70);
      }
      passages.push_back(std::move(p));
    }
    corpus.evidence.push_back(Finalize(rng, qid, "-p", std::move(passages)));

    // Second retrieval backing two alternative answers.
    const std::string alt = distractors[2];
    const std::string alt2 = distractors[3];
    std::vector<Passage> alt_passages;
    for (int k = 0; k < options.alternative_passages; ++k) {
      Passage p;
      if (k < 6) {
        p = ValuePassage(rng, spec, qid, "", topic, k % 3 == 2 ? alt2 : alt);
        p.retrieval_score = Uniform(rng, 60, 80);
      } else {
        p = FillerPassage(rng, qid, "", topic);
        p.retrieval_score = Uniform(rng, 50, 70);
      }
      p.attention_score = Uniform(rng, 0.2, 0.9);
      alt_passages.push_back(std::move(p));
    }
    corpus.alternative_evidence.push_back(Finalize(rng, qid, "-b", std::move(alt_passages)));
    corpus.alternatives[qid] = {{answer, "2018-12-20"}, {alt, "2021-02-01"}, {alt2, "2019-06-15"}};
  }

  for (int i = 0; i < options.train_questions; ++i) {
    const TypeSpec& spec = Specs()[static_cast<size_t>(i) % Specs().size()];
    ValueBank& bank = banks[spec.type];
    const std::string answer = bank.train[rng.UniformIndex(bank.train.size())];
    const std::string topic = topics[rng.UniformIndex(topics.size())];
    corpus.train_questions.push_back({"train-" + std::to_string(i + 1), Question(spec, topic),
                                      {answer}, spec.type});
  }
  return corpus;
}

void WriteToyCorpus(const ToyCorpus& corpus, const std::filesystem::path& dir) {
  WriteQuestions(dir / "questions.jsonl", corpus.questions);
  WriteEvidence(dir / "passages.jsonl", corpus.evidence);
  WriteQuestions(dir / "train_questions.jsonl", corpus.train_questions);
  WriteEvidence(dir / "alt" / "passages.jsonl", corpus.alternative_evidence);
  std::vector<Json> rows;
  for (const QuestionRecord& q : corpus.questions) {
    const auto it = corpus.alternatives.find(q.qid);
    if (it != corpus.alternatives.end()) rows.push_back(AlternativesToJson(q.qid, it->second));
  }
  WriteJsonl(dir / "alt" / "alternatives.jsonl", rows);
}

}  // namespace kconflict
