#include "crowdest/stream.hpp"

#include "crowdest/csv.hpp"
#include "crowdest/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <unordered_map>

namespace crowdest {

namespace {

constexpr std::string_view kHeader[] = {"hit_index", "worker_id", "answer"};

bool is_space(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
}

char ascii_lower(char ch) {
  return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch;
}

}  // namespace

AnswerStream::AnswerStream(std::vector<AnswerRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].answer.empty()) {
      throw DomainError(fmt::format("record {}: empty answer", records_[i].hit_index));
    }
    if (i > 0 && records_[i].hit_index <= records_[i - 1].hit_index) {
      throw DomainError(fmt::format("hit_index {} does not increase after {}",
                                    records_[i].hit_index, records_[i - 1].hit_index));
    }
  }
}

AnswerStream AnswerStream::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& worker_answers) {
  std::vector<AnswerRecord> records;
  records.reserve(worker_answers.size());
  for (std::size_t i = 0; i < worker_answers.size(); ++i) {
    records.push_back({i, worker_answers[i].first, worker_answers[i].second});
  }
  return AnswerStream(std::move(records));
}

FrequencyStatistics FrequencyStatistics::from_histogram(
    const std::map<std::size_t, std::size_t>& histogram) {
  FrequencyStatistics out;
  for (auto [j, fj] : histogram) {
    if (j == 0) throw DomainError("frequency class j must be >= 1");
    if (fj == 0) continue;
    out.f.emplace(j, fj);
    out.c += fj;
    out.n += j * fj;
  }
  return out;
}

FrequencyStatistics FrequencyStatistics::from_class_counts(std::span<const std::size_t> counts) {
  std::map<std::size_t, std::size_t> histogram;
  for (std::size_t k : counts) {
    if (k > 0) ++histogram[k];
  }
  return from_histogram(histogram);
}

std::string normalize_answer(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    if (is_space(ch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(ascii_lower(ch));
  }
  if (out.empty()) throw BlankAnswer();
  return out;
}

AnswerStream parse_stream(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError("missing header `hit_index,worker_id,answer`");

  const auto& header = rows.front().fields;
  if (header.size() != 3 || !std::equal(header.begin(), header.end(), std::begin(kHeader))) {
    throw ParseError("line 1: header must be exactly `hit_index,worker_id,answer`");
  }

  std::vector<AnswerRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 3) {
      throw ParseError(fmt::format("line {}: expected 3 columns, found {}", row.line,
                                   row.fields.size()));
    }
    const std::string& index_text = row.fields[0];
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
    if (ec != std::errc{} || ptr != index_text.data() + index_text.size() || index_text.empty()) {
      throw ParseError(fmt::format("line {}: invalid hit_index '{}'", row.line, index_text));
    }
    if (row.fields[1].empty()) {
      throw ParseError(fmt::format("line {}: empty worker_id", row.line));
    }
    std::string answer;
    try {
      answer = normalize_answer(row.fields[2]);
    } catch (const BlankAnswer&) {
      throw ParseError(fmt::format("line {}: blank answer", row.line));
    }
    records.push_back({index, row.fields[1], std::move(answer)});
  }

  // Remember source lines so duplicate/gap errors can point at a row.
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].hit_index < records[b].hit_index;
  });
  std::vector<AnswerRecord> sorted;
  sorted.reserve(records.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& rec = records[order[k]];
    const std::size_t line = rows[order[k] + 1].line;
    if (k > 0 && rec.hit_index == sorted.back().hit_index) {
      throw ParseError(fmt::format("line {}: duplicate hit_index {}", line, rec.hit_index));
    }
    if (rec.hit_index != k) {
      throw ParseError(fmt::format("line {}: hit_index {} leaves a gap (expected {})", line,
                                   rec.hit_index, k));
    }
    sorted.push_back(rec);
  }
  return AnswerStream(std::move(sorted));
}

std::string serialize_stream(const AnswerStream& stream) {
  std::string out = "hit_index,worker_id,answer\n";
  for (const auto& rec : stream) {
    out += csv::join({std::to_string(rec.hit_index), rec.worker_id, rec.answer});
    out.push_back('\n');
  }
  return out;
}

std::vector<std::size_t> answer_ids(const AnswerStream& stream) {
  std::unordered_map<std::string_view, std::size_t> ids;
  ids.reserve(stream.size());
  std::vector<std::size_t> out;
  out.reserve(stream.size());
  for (const auto& rec : stream) {
    auto [it, inserted] = ids.try_emplace(rec.answer, ids.size());
    out.push_back(it->second);
  }
  return out;
}

FrequencyStatistics compute_fstat(const AnswerStream& stream) {
  if (stream.empty()) throw DomainError("no samples");
  const auto ids = answer_ids(stream);
  std::vector<std::size_t> counts;
  for (std::size_t id : ids) {
    if (id >= counts.size()) counts.resize(id + 1, 0);
    ++counts[id];
  }
  return FrequencyStatistics::from_class_counts(counts);
}

double f1_ratio(const FrequencyStatistics& fstat) {
  if (fstat.c == 0) throw DomainError("f1-ratio needs at least one distinct answer");
  return static_cast<double>(fstat.singletons()) / static_cast<double>(fstat.c);
}

SACurve sac(const AnswerStream& stream) {
  SACurve curve;
  curve.points.reserve(stream.size());
  const auto ids = answer_ids(stream);
  std::size_t unique = 0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    // Ids are handed out in first-appearance order, so a new answer is the next id.
    if (ids[k] == unique) ++unique;
    curve.points.push_back({k + 1, unique});
  }
  return curve;
}

AnswerStream prefix(const AnswerStream& stream, std::size_t k) {
  if (k > stream.size()) {
    throw DomainError(fmt::format("prefix length {} exceeds stream size {}", k, stream.size()));
  }
  return AnswerStream(std::vector<AnswerRecord>(stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(k)));
}

std::vector<WorkerSequence> worker_sequences(const AnswerStream& stream) {
  std::vector<WorkerSequence> out;
  std::unordered_map<std::string_view, std::size_t> slot;
  for (const auto& rec : stream) {
    auto [it, inserted] = slot.try_emplace(rec.worker_id, out.size());
    if (inserted) out.push_back({rec.worker_id, {}});
    out[it->second].answers.push_back({rec.hit_index, rec.answer});
  }
  return out;
}

}  // namespace crowdest
