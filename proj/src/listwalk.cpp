#include "crowdest/listwalk.hpp"

#include "crowdest/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace crowdest {

namespace {

struct IndexedWorker {
  const WorkerSequence* source = nullptr;
  std::vector<std::size_t> ids;  // dense answer ids by position
};

struct RawWindow {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::vector<std::size_t> members;  // indices into the worker table, ascending
  std::size_t cohort = 0;
  double sequence_probability = 0.0;
  double probability = 0.0;
};

// Keep only windows not nested inside another window of the same worker set.
std::vector<RawWindow> consolidate(std::vector<RawWindow> windows) {
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_members;
  for (std::size_t i = 0; i < windows.size(); ++i) by_members[windows[i].members].push_back(i);

  std::vector<bool> subsumed(windows.size(), false);
  for (const auto& [members, idx] : by_members) {
    for (std::size_t a : idx) {
      const auto& wa = windows[a];
      for (std::size_t b : idx) {
        if (a == b) continue;
        const auto& wb = windows[b];
        const bool nested = wb.offset <= wa.offset &&
                            wa.offset + wa.length <= wb.offset + wb.length &&
                            (wb.offset != wa.offset || wb.length != wa.length);
        if (nested) {
          subsumed[a] = true;
          break;
        }
      }
    }
  }
  std::vector<RawWindow> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!subsumed[i]) out.push_back(std::move(windows[i]));
  }
  return out;
}

}  // namespace

void ListWalkConfig::validate() const {
  if (s_min < 2) throw DomainError("s_min must be >= 2");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (!(h > 0.0 && h < 1.0)) throw DomainError("h must lie in (0, 1)");
  if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("threshold must lie in (0, 1)");
}

double smoothed_sequence_probability(std::span<const std::size_t> matches, std::size_t cohort,
                                     double beta, double h) {
  if (cohort == 0) throw DomainError("empty cohort");
  const double prior = (1.0 - beta) * (1.0 - h);
  double p = 1.0;
  for (std::size_t r : matches) {
    p *= beta * static_cast<double>(r) / static_cast<double>(cohort) + prior;
  }
  return p;
}

double target_probability(std::span<const std::string> sequence, std::size_t offset,
                          std::span<const WorkerSequence> cohort, double beta, double h) {
  if (cohort.empty()) throw DomainError("empty cohort");
  std::vector<std::size_t> matches(sequence.size(), 0);
  for (const auto& worker : cohort) {
    if (worker.answers.size() < offset + sequence.size()) {
      throw DomainError(fmt::format("worker {} has {} answers, window needs {}", worker.worker_id,
                                    worker.answers.size(), offset + sequence.size()));
    }
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      if (worker.answers[offset + i].answer == sequence[i]) ++matches[i];
    }
  }
  return smoothed_sequence_probability(matches, cohort.size(), beta, h);
}

double binomial_tail(std::size_t w, std::size_t big_w, double p) {
  if (w == 0) return 1.0;
  if (w > big_w) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double n = static_cast<double>(big_w);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> logs;
  logs.reserve(big_w - w + 1);
  for (std::size_t i = w; i <= big_w; ++i) {
    const double k = static_cast<double>(i);
    logs.push_back(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                   k * log_p + (n - k) * log_q);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - top);
  return std::min(1.0, std::exp(top) * sum);
}

ListWalkReport scan(const AnswerStream& stream, const ListWalkConfig& cfg) {
  cfg.validate();
  const auto sequences = worker_sequences(stream);
  const auto ids = answer_ids(stream);
  std::unordered_map<std::size_t, std::size_t> id_of_hit;
  id_of_hit.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) id_of_hit.emplace(stream[i].hit_index, ids[i]);

  std::vector<IndexedWorker> workers;
  workers.reserve(sequences.size());
  std::size_t longest = 0;
  for (const auto& seq : sequences) {
    IndexedWorker iw{&seq, {}};
    iw.ids.reserve(seq.answers.size());
    for (const auto& a : seq.answers) iw.ids.push_back(id_of_hit.at(a.hit_index));
    longest = std::max(longest, iw.ids.size());
    workers.push_back(std::move(iw));
  }

  // cohort_at_least[k] = number of workers with at least k answers.
  std::vector<std::size_t> cohort_at_least(longest + 2, 0);
  for (const auto& w : workers) ++cohort_at_least[w.ids.size()];
  for (std::size_t k = longest; k-- > 0;) cohort_at_least[k] += cohort_at_least[k + 1];

  std::vector<RawWindow> detected;
  std::vector<std::size_t> matches;
  for (std::size_t offset = 0; offset + cfg.s_min <= longest; ++offset) {
    // Groups of >= 2 workers agreeing on positions offset..offset+s-1.
    std::vector<std::vector<std::size_t>> groups;
    {
      std::map<std::size_t, std::vector<std::size_t>> first;
      for (std::size_t w = 0; w < workers.size(); ++w) {
        if (workers[w].ids.size() > offset) first[workers[w].ids[offset]].push_back(w);
      }
      for (auto& [id, members] : first) {
        if (members.size() >= 2) groups.push_back(std::move(members));
      }
    }
    for (std::size_t s = 1; !groups.empty() && offset + s <= longest; ++s) {
      if (s > 1) {
        std::vector<std::vector<std::size_t>> refined;
        for (const auto& g : groups) {
          std::map<std::size_t, std::vector<std::size_t>> split;
          for (std::size_t w : g) {
            if (workers[w].ids.size() >= offset + s) split[workers[w].ids[offset + s - 1]].push_back(w);
          }
          for (auto& [id, members] : split) {
            if (members.size() >= 2) refined.push_back(std::move(members));
          }
        }
        groups = std::move(refined);
      }
      if (s < cfg.s_min) continue;

      const std::size_t cohort = cohort_at_least[offset + s];
      for (const auto& g : groups) {
        const auto& alpha = workers[g.front()].ids;
        matches.assign(s, 0);
        for (const auto& w : workers) {
          if (w.ids.size() < offset + s) continue;
          for (std::size_t i = 0; i < s; ++i) {
            if (w.ids[offset + i] == alpha[offset + i]) ++matches[i];
          }
        }
        const double p_seq = smoothed_sequence_probability(matches, cohort, cfg.beta, cfg.h);
        const double tail = binomial_tail(g.size(), cohort, p_seq);
        if (tail < cfg.threshold) detected.push_back({offset, s, g, cohort, p_seq, tail});
      }
    }
  }

  detected = consolidate(std::move(detected));

  ListWalkReport report;
  report.total_hits = stream.size();
  std::set<std::size_t> covered;
  for (const auto& raw : detected) {
    DetectedWindow win;
    win.offset = raw.offset;
    win.length = raw.length;
    win.cohort = raw.cohort;
    win.sequence_probability = raw.sequence_probability;
    win.probability = raw.probability;
    const WorkerSequence& lead = *workers[raw.members.front()].source;
    for (std::size_t i = 0; i < raw.length; ++i) win.sequence.push_back(lead.answers[raw.offset + i].answer);
    for (std::size_t m : raw.members) {
      const WorkerSequence& seq = *workers[m].source;
      win.workers.push_back(seq.worker_id);
      for (std::size_t i = 0; i < raw.length; ++i) covered.insert(seq.answers[raw.offset + i].hit_index);
    }
    std::sort(win.workers.begin(), win.workers.end());
    report.windows.push_back(std::move(win));
  }
  std::sort(report.windows.begin(), report.windows.end(), [](const DetectedWindow& a, const DetectedWindow& b) {
    return std::tie(a.offset, a.length, a.workers) < std::tie(b.offset, b.length, b.workers);
  });
  report.affected_indices.assign(covered.begin(), covered.end());
  report.affected_hits = covered.size();
  return report;
}

std::vector<AffectedPoint> affected_series(const AnswerStream& stream, const ListWalkConfig& cfg,
                                           std::size_t step) {
  if (step < 1) throw DomainError("step must be >= 1");
  std::vector<AffectedPoint> out;
  const std::size_t n = stream.size();
  for (std::size_t k = step; k < n + step; k += step) {
    const std::size_t hits = std::min(k, n);
    out.push_back({hits, scan(prefix(stream, hits), cfg).affected_hits});
  }
  return out;
}

nlohmann::json to_json(const ListWalkReport& report, const ListWalkConfig& cfg) {
  nlohmann::json windows = nlohmann::json::array();
  for (const auto& w : report.windows) {
    windows.push_back({{"offset", w.offset},
                       {"length", w.length},
                       {"sequence", w.sequence},
                       {"workers", w.workers},
                       {"shared_by", w.workers.size()},
                       {"cohort", w.cohort},
                       {"sequence_probability", w.sequence_probability},
                       {"probability", w.probability}});
  }
  nlohmann::json series = nlohmann::json::array();
  for (const auto& p : report.affected_series) series.push_back({{"hits", p.hits}, {"affected", p.affected}});
  const double fraction = report.total_hits == 0
                              ? 0.0
                              : static_cast<double>(report.affected_hits) / static_cast<double>(report.total_hits);
  return {{"config",
           {{"s_min", cfg.s_min}, {"beta", cfg.beta}, {"h", cfg.h}, {"threshold", cfg.threshold}}},
          {"total_hits", report.total_hits},
          {"affected_hits", report.affected_hits},
          {"affected_fraction", fraction},
          {"affected_indices", report.affected_indices},
          {"windows", std::move(windows)},
          {"affected_series", std::move(series)}};
}

}  // namespace crowdest
