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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pmimask/types.hpp"

namespace pmimask {

// Immutable token-string <-> token-id map.
//
// File format: UTF-8, one token per line, the id is the 0-based index among
// token lines. Lines of the form
//
//   #special <token> [pad|unk|mask]
//
// are directives, not tokens: they mark an existing token as special and may
// assign it a role. Without an explicit role, [PAD]/<pad>, [UNK]/<unk> and
// [MASK]/<mask> are recognised by name.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary Load(const std::filesystem::path& path);
  static Vocabulary Parse(std::istream& in);
  static Vocabulary FromTokens(std::vector<std::string> tokens,
                               std::span<const std::string> specials = {});

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  std::optional<TokenId> Find(std::string_view token) const;
  const std::string& Token(TokenId id) const { return tokens_.at(id); }

  bool IsSpecial(TokenId id) const noexcept {
    return id < is_special_.size() && is_special_[id];
  }
  const std::vector<TokenId>& special_ids() const noexcept { return special_ids_; }
  // Ids that may be masked and drawn as random replacements.
  const std::vector<TokenId>& regular_ids() const noexcept { return regular_ids_; }

  std::optional<TokenId> pad_id() const noexcept { return pad_id_; }
  std::optional<TokenId> unk_id() const noexcept { return unk_id_; }
  std::optional<TokenId> mask_id() const noexcept { return mask_id_; }

 private:
  void MarkSpecial(TokenId id);
  void Finalize();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::vector<char> is_special_;
  std::vector<TokenId> special_ids_;
  std::vector<TokenId> regular_ids_;
  std::optional<TokenId> pad_id_;
  std::optional<TokenId> unk_id_;
  std::optional<TokenId> mask_id_;
};

/// Positions of non-special tokens, ascending.
std::vector<Position> EligiblePositions(const Document& doc, const Vocabulary& vocab);

// Reads one document per line; tokens are separated by spaces or tabs.
// Unknown tokens map to the vocabulary's unk id. Empty lines yield empty
// documents so doc ids stay aligned with source line numbers.
class DocumentReader {
 public:
  DocumentReader(std::filesystem::path path, const Vocabulary& vocab);

  /// Returns false at end of stream.
  bool Next(Document& doc);
  /// Restarts from the first line; doc ids restart at 0.
  void Rewind();

  std::uint64_t documents_read() const noexcept { return next_id_; }

 private:
  std::filesystem::path path_;
  const Vocabulary* vocab_;
  std::ifstream in_;
  std::string line_;
  DocId next_id_ = 0;
};

// Documents from several corpus files in order; doc ids continue across file
// boundaries.
class CorpusSource {
 public:
  CorpusSource(std::vector<std::filesystem::path> paths, const Vocabulary& vocab);

  /// Replaces `batch` with up to `max_docs` documents; returns false when the
  /// corpus is exhausted and nothing was read.
  bool NextBatch(std::vector<Document>& batch, std::size_t max_docs);
  void Rewind();

  const std::vector<std::filesystem::path>& paths() const noexcept { return paths_; }

 private:
  std::vector<std::filesystem::path> paths_;
  const Vocabulary* vocab_;
  std::size_t file_ = 0;
  std::optional<DocumentReader> reader_;
  DocId next_id_ = 0;
};

std::vector<Document> ReadAllDocuments(const std::filesystem::path& path,
                                       const Vocabulary& vocab);
/// Number of newline-delimited records without tokenizing.
std::uint64_t CountDocuments(const std::filesystem::path& path);
/// Maps tokens of one line through the vocabulary (unk for unknown strings).
std::vector<TokenId> Tokenize(std::string_view line, const Vocabulary& vocab);

}  // namespace pmimask
