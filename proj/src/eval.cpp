#include "salientcut/eval.hpp"

#include <sstream>

#include "json.hpp"

#include "salientcut/parallel.hpp"

namespace salientcut {

namespace {

nlohmann::json confusion_json(const Confusion& c) {
  return {{"tp", c.tp},         {"tn", c.tn},         {"fp", c.fp},
          {"fn", c.fn},         {"error", c.error},   {"recall", c.recall},
          {"precision", c.precision}, {"f_value", c.f_value}};
}

}  // namespace

void finish_metrics(Confusion& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double total = tp + tn + fp + fn;
  c.error = total > 0 ? (fp + fn) / total : 0.0;
  c.recall = (c.tp + c.fn) == 0 ? 1.0 : tp / (tp + fn);
  c.precision = (c.tp + c.fp) == 0 ? 1.0 : tp / (tp + fp);
  c.f_value = c.recall + c.precision == 0.0 ? 0.0 : 2.0 * c.recall * c.precision / (c.recall + c.precision);
}

MetricsReport score(const std::vector<LabelField>& predicted, const std::vector<LabelField>& truth) {
  if (predicted.size() != truth.size())
    throw InvalidArgument("score: " + std::to_string(predicted.size()) + " predicted frames vs " +
                          std::to_string(truth.size()) + " truth frames");
  for (std::size_t t = 0; t < predicted.size(); ++t)
    if (!predicted[t].same_size(truth[t]) || predicted[t].labels.size() != truth[t].labels.size())
      throw InvalidArgument("score: frame " + std::to_string(t) + " dimensions differ");

  MetricsReport r;
  r.per_frame.resize(predicted.size());
  parallel_for(0, predicted.size(), 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      Confusion c;
      const auto& p = predicted[t].labels;
      const auto& g = truth[t].labels;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const bool a = p[i] != 0, b = g[i] != 0;
        if (a && b) ++c.tp;
        else if (!a && !b) ++c.tn;
        else if (a) ++c.fp;
        else ++c.fn;
      }
      finish_metrics(c);
      r.per_frame[t] = c;
    }
  });
  for (const auto& c : r.per_frame) {
    r.tp += c.tp;
    r.tn += c.tn;
    r.fp += c.fp;
    r.fn += c.fn;
  }
  finish_metrics(r);
  return r;
}

double stability(const std::vector<LabelField>& masks) {
  if (masks.size() < 2) throw InvalidArgument("stability: needs at least 2 frames");
  double sum = 0.0;
  for (std::size_t t = 1; t < masks.size(); ++t) {
    const auto& a = masks[t - 1];
    const auto& b = masks[t];
    if (!a.same_size(b)) throw InvalidArgument("stability: mask sizes differ");
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.labels.size(); ++i) diff += (a.labels[i] != 0) != (b.labels[i] != 0);
    sum += a.labels.empty() ? 0.0 : static_cast<double>(diff) / static_cast<double>(a.labels.size());
  }
  return sum / static_cast<double>(masks.size() - 1);
}

double iou(const LabelField& a, const LabelField& b) {
  if (!a.same_size(b)) throw InvalidArgument("iou: mask sizes differ");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const bool x = a.labels[i] != 0, y = b.labels[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::string to_json(const MetricsReport& report) {
  nlohmann::json j = confusion_json(report);
  j["per_frame"] = nlohmann::json::array();
  for (const auto& c : report.per_frame) j["per_frame"].push_back(confusion_json(c));
  return j.dump(2);
}

std::string to_csv(const MetricsReport& report) {
  std::ostringstream o;
  o.precision(10);
  o << "frame,tp,tn,fp,fn,error,recall,precision,f_value\n";
  for (std::size_t t = 0; t < report.per_frame.size(); ++t) {
    const auto& c = report.per_frame[t];
    o << t << ',' << c.tp << ',' << c.tn << ',' << c.fp << ',' << c.fn << ',' << c.error << ',' << c.recall << ','
      << c.precision << ',' << c.f_value << '\n';
  }
  return o.str();
}

std::vector<LabelField> run_strategy(const std::vector<PixelGrid>& frames, Strategy strategy, const SegConfig& cfg,
                                     const std::vector<Seed>* seeds, std::vector<StageTimes>* times) {
  if (frames.empty()) throw InvalidArgument("run_strategy: empty frame sequence");
  if (strategy == Strategy::manual && (!seeds || seeds->empty()))
    throw InvalidArgument("run_strategy: manual strategy requires seeds");
  Segmenter seg(cfg, strategy, strategy == Strategy::manual ? *seeds : std::vector<Seed>{});
  std::vector<LabelField> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    FrameResult r = seg.process(f);
    if (times) times->push_back(r.times);
    out.push_back(std::move(r.mask));
  }
  return out;
}

}  // namespace salientcut
