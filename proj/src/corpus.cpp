// Copyright 2026 The pmimask Authors
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

#include "pmimask/corpus.hpp"

#include <algorithm>
#include <sstream>

#include "pmimask/error.hpp"

namespace pmimask {
namespace {

constexpr std::string_view kSpecialDirective = "#special ";

void StripCarriageReturn(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\v' || c == '\f'; }

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !IsSpace(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string RoleFromName(std::string_view token) {
  const std::string t = Lower(token);
  if (t == "[pad]" || t == "<pad>") return "pad";
  if (t == "[unk]" || t == "<unk>") return "unk";
  if (t == "[mask]" || t == "<mask>") return "mask";
  return "";
}

struct SpecialDecl {
  std::string token;
  std::string role;
  std::size_t line;
};

}  // namespace

const char* ErrorCodeName(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDuplicateToken: return "DuplicateToken";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kInvalidToken: return "InvalidToken";
    case ErrorCode::kShardMismatch: return "ShardMismatch";
    case ErrorCode::kEmptyCounts: return "EmptyCounts";
    case ErrorCode::kEmptyDocument: return "EmptyDocument";
    case ErrorCode::kInvalidPolicy: return "InvalidPolicy";
    case ErrorCode::kAlignmentError: return "AlignmentError";
    case ErrorCode::kUndefined: return "Undefined";
    case ErrorCode::kUnknownStrategy: return "UnknownStrategy";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
  }
  return "Unknown";
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open vocabulary file " + path.string());
  return Parse(in);
}

Vocabulary Vocabulary::Parse(std::istream& in) {
  Vocabulary vocab;
  std::vector<SpecialDecl> decls;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(line);
    if (line.starts_with(kSpecialDirective)) {
      const auto fields = SplitWhitespace(std::string_view(line).substr(kSpecialDirective.size()));
      if (fields.empty() || fields.size() > 2) {
        throw Error(ErrorCode::kFormatError,
                    "malformed #special directive at line " + std::to_string(line_no));
      }
      decls.push_back({std::string(fields[0]), fields.size() == 2 ? std::string(fields[1]) : "",
                       line_no});
      continue;
    }
    if (line.empty() || std::any_of(line.begin(), line.end(), IsSpace)) {
      throw Error(ErrorCode::kFormatError,
                  "vocabulary line " + std::to_string(line_no) + " is not a single token");
    }
    if (vocab.tokens_.size() >= 0xffffffffULL) {
      throw Error(ErrorCode::kFormatError, "vocabulary exceeds 2^32-1 entries");
    }
    const auto id = static_cast<TokenId>(vocab.tokens_.size());
    if (!vocab.index_.emplace(line, id).second) {
      throw Error(ErrorCode::kDuplicateToken,
                  "duplicate token '" + line + "' at line " + std::to_string(line_no));
    }
    vocab.tokens_.push_back(line);
  }
  if (in.bad()) throw Error(ErrorCode::kIoError, "error reading vocabulary");

  vocab.is_special_.assign(vocab.tokens_.size(), 0);
  for (const SpecialDecl& d : decls) {
    const auto it = vocab.index_.find(d.token);
    if (it == vocab.index_.end()) {
      throw Error(ErrorCode::kFormatError, "#special token '" + d.token + "' (line " +
                                               std::to_string(d.line) +
                                               ") is not in the vocabulary");
    }
    const std::string role = d.role.empty() ? RoleFromName(d.token) : Lower(d.role);
    std::optional<TokenId>* slot = nullptr;
    if (role == "pad") slot = &vocab.pad_id_;
    else if (role == "unk") slot = &vocab.unk_id_;
    else if (role == "mask") slot = &vocab.mask_id_;
    else if (!role.empty())
      throw Error(ErrorCode::kFormatError, "unknown special role '" + d.role + "'");
    if (slot != nullptr) {
      if (slot->has_value() && **slot != it->second) {
        throw Error(ErrorCode::kFormatError, "special role '" + role + "' assigned twice");
      }
      *slot = it->second;
    }
    vocab.MarkSpecial(it->second);
  }
  vocab.Finalize();
  return vocab;
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens,
                                  std::span<const std::string> specials) {
  std::ostringstream text;
  for (const std::string& s : specials) text << kSpecialDirective << s << '\n';
  for (const std::string& t : tokens) text << t << '\n';
  std::istringstream in(text.str());
  return Parse(in);
}

void Vocabulary::MarkSpecial(TokenId id) { is_special_[id] = 1; }

void Vocabulary::Finalize() {
  special_ids_.clear();
  regular_ids_.clear();
  for (TokenId id = 0; id < tokens_.size(); ++id) {
    (is_special_[id] ? special_ids_ : regular_ids_).push_back(id);
  }
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Position> EligiblePositions(const Document& doc, const Vocabulary& vocab) {
  std::vector<Position> out;
  out.reserve(doc.tokens.size());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (!vocab.IsSpecial(doc.tokens[i])) out.push_back(static_cast<Position>(i));
  }
  return out;
}

std::vector<TokenId> Tokenize(std::string_view line, const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  for (std::string_view tok : SplitWhitespace(line)) {
    if (auto id = vocab.Find(tok)) {
      ids.push_back(*id);
    } else if (vocab.unk_id()) {
      ids.push_back(*vocab.unk_id());
    } else {
      throw Error(ErrorCode::kInvalidToken, "token '" + std::string(tok) +
                                                "' is not in the vocabulary and no unk "
                                                "token is declared");
    }
  }
  return ids;
}

DocumentReader::DocumentReader(std::filesystem::path path, const Vocabulary& vocab)
    : path_(std::move(path)), vocab_(&vocab) {
  Rewind();
}

void DocumentReader::Rewind() {
  in_.close();
  in_.clear();
  in_.open(path_, std::ios::binary);
  if (!in_) throw Error(ErrorCode::kIoError, "cannot open corpus file " + path_.string());
  next_id_ = 0;
}

bool DocumentReader::Next(Document& doc) {
  if (!std::getline(in_, line_)) {
    if (in_.bad()) throw Error(ErrorCode::kIoError, "error reading " + path_.string());
    return false;
  }
  StripCarriageReturn(line_);
  doc.doc_id = next_id_++;
  doc.tokens = Tokenize(line_, *vocab_);
  return true;
}

std::vector<Document> ReadAllDocuments(const std::filesystem::path& path,
                                       const Vocabulary& vocab) {
  DocumentReader reader(path, vocab);
  std::vector<Document> docs;
  Document doc;
  while (reader.Next(doc)) docs.push_back(std::move(doc));
  return docs;
}

std::uint64_t CountDocuments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open corpus file " + path.string());
  std::uint64_t records = 0;
  char buf[1 << 16];
  char last = '\n';
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    records += static_cast<std::uint64_t>(std::count(buf, buf + got, '\n'));
    last = buf[got - 1];
  }
  if (last != '\n') ++records;
  return records;
}

}  // namespace pmimask

namespace pmimask {

CorpusSource::CorpusSource(std::vector<std::filesystem::path> paths, const Vocabulary& vocab)
    : paths_(std::move(paths)), vocab_(&vocab) {
  for (const auto& p : paths_) {
    if (!std::filesystem::is_regular_file(p)) {
      throw Error(ErrorCode::kIoError, "cannot open corpus file " + p.string());
    }
  }
}

void CorpusSource::Rewind() {
  file_ = 0;
  reader_.reset();
  next_id_ = 0;
}

bool CorpusSource::NextBatch(std::vector<Document>& batch, std::size_t max_docs) {
  batch.clear();
  while (batch.size() < max_docs && file_ < paths_.size()) {
    if (!reader_) reader_.emplace(paths_[file_], *vocab_);
    Document doc;
    if (!reader_->Next(doc)) {
      reader_.reset();
      ++file_;
      continue;
    }
    doc.doc_id = next_id_++;
    batch.push_back(std::move(doc));
  }
  return !batch.empty();
}

}  // namespace pmimask
