#pragma once

// Answer streams: the ordered log of (worker, answer) HIT responses and the
// sufficient statistics every estimator consumes.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crowdest {

/// One HIT response. hit_index is the global arrival position.
struct AnswerRecord {
  std::size_t hit_index = 0;
  std::string worker_id;
  std::string answer;

  friend bool operator==(const AnswerRecord&, const AnswerRecord&) = default;
};

/// Ordered sequence of answer records.
///
/// Construction checks that hit indices strictly increase and that every
/// answer is non-empty. Streams read from CSV additionally start at 0 and are
/// contiguous; streams produced by the bias-correction heuristics are
/// subsequences and keep the original indices.
class AnswerStream {
 public:
  AnswerStream() = default;
  explicit AnswerStream(std::vector<AnswerRecord> records);

  /// Builds a stream with hit indices 0..n-1 from (worker, answer) pairs.
  /// Answers are taken verbatim (callers normalize when needed).
  static AnswerStream from_pairs(
      const std::vector<std::pair<std::string, std::string>>& worker_answers);

  [[nodiscard]] const std::vector<AnswerRecord>& records() const noexcept { return records_; }
  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
  [[nodiscard]] const AnswerRecord& operator[](std::size_t i) const { return records_[i]; }
  [[nodiscard]] auto begin() const noexcept { return records_.begin(); }
  [[nodiscard]] auto end() const noexcept { return records_.end(); }

  friend bool operator==(const AnswerStream&, const AnswerStream&) = default;

 private:
  std::vector<AnswerRecord> records_;
};

struct WorkerAnswer {
  std::size_t hit_index = 0;
  std::string answer;

  friend bool operator==(const WorkerAnswer&, const WorkerAnswer&) = default;
};

/// All answers of one worker, in arrival order.
struct WorkerSequence {
  std::string worker_id;
  std::vector<WorkerAnswer> answers;
};

/// Frequency-of-frequencies statistic: f[j] is the number of distinct answers
/// seen exactly j times. Only non-zero entries are stored.
struct FrequencyStatistics {
  std::size_t n = 0;  // sample size
  std::size_t c = 0;  // distinct answers
  std::map<std::size_t, std::size_t> f;

  [[nodiscard]] std::size_t count(std::size_t j) const {
    auto it = f.find(j);
    return it == f.end() ? 0 : it->second;
  }
  [[nodiscard]] std::size_t singletons() const { return count(1); }
  [[nodiscard]] std::size_t doubletons() const { return count(2); }

  /// Builds the statistic from a histogram j -> f_j, deriving n and c.
  /// Zero entries are dropped; j = 0 is rejected.
  static FrequencyStatistics from_histogram(const std::map<std::size_t, std::size_t>& histogram);

  /// Builds the statistic from per-class occurrence counts (zeros ignored).
  static FrequencyStatistics from_class_counts(std::span<const std::size_t> counts);

  friend bool operator==(const FrequencyStatistics&, const FrequencyStatistics&) = default;
};

struct SACPoint {
  std::size_t hits = 0;
  std::size_t unique = 0;

  friend bool operator==(const SACPoint&, const SACPoint&) = default;
};

/// Species accumulation curve: distinct answers after each record.
struct SACurve {
  std::vector<SACPoint> points;

  friend bool operator==(const SACurve&, const SACurve&) = default;
};

/// Trim, collapse internal whitespace runs to one space, ASCII-lowercase.
/// Throws BlankAnswer when nothing is left.
[[nodiscard]] std::string normalize_answer(std::string_view raw);

/// Reads the `hit_index,worker_id,answer` CSV format. Rows may appear in any
/// order; the result is sorted by hit_index, which must then run 0..n-1.
/// Throws ParseError naming the offending row.
[[nodiscard]] AnswerStream parse_stream(std::string_view text);

/// Writes the CSV format read by parse_stream (LF endings, header first).
[[nodiscard]] std::string serialize_stream(const AnswerStream& stream);

/// Throws DomainError("no samples") on an empty stream.
[[nodiscard]] FrequencyStatistics compute_fstat(const AnswerStream& stream);

/// f_1 / c. Throws DomainError when c = 0.
[[nodiscard]] double f1_ratio(const FrequencyStatistics& fstat);

[[nodiscard]] SACurve sac(const AnswerStream& stream);

/// First k records. Throws DomainError when k > size.
[[nodiscard]] AnswerStream prefix(const AnswerStream& stream, std::size_t k);

/// Per-worker subsequences, ordered by each worker's first appearance.
[[nodiscard]] std::vector<WorkerSequence> worker_sequences(const AnswerStream& stream);

/// Dense ids for answers, assigned in order of first appearance.
/// result[i] is the id of stream[i].answer; ids lie in [0, distinct count).
[[nodiscard]] std::vector<std::size_t> answer_ids(const AnswerStream& stream);

}  // namespace crowdest
