#include "evipath/train_export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "evipath/jsonl.hpp"
#include "evipath/text.hpp"

namespace evipath {

namespace {

double sim_for(const std::map<std::string, double>& sims, const std::string& pid) {
  const auto it = sims.find(pid);
  if (it == sims.end()) {
    throw std::invalid_argument("no similarity provided for passage \"" + pid + "\"");
  }
  return it->second;
}

}  // namespace

double contrastive_loss(const TrainingSample& sample,
                        const std::map<std::string, double>& sims) {
  if (sample.positives.empty()) {
    throw std::invalid_argument("contrastive loss needs at least one positive");
  }
  std::vector<double> negative_sims;
  negative_sims.reserve(sample.negatives.size());
  for (const auto& pid : sample.negatives) {
    negative_sims.push_back(sim_for(sims, pid));
  }

  double loss = 0.0;
  for (const auto& pid : sample.positives) {
    const double pos = sim_for(sims, pid);
    double max_logit = pos;
    for (const double neg : negative_sims) {
      max_logit = std::max(max_logit, neg);
    }
    // -log softmax(pos | pos, negs), shifted by the max logit
    double denom = std::exp(pos - max_logit);
    for (const double neg : negative_sims) {
      denom += std::exp(neg - max_logit);
    }
    loss += std::log(denom) - (pos - max_logit);
  }
  return loss;
}

std::vector<TrainingSample> augment_training_set(
    const std::vector<TrainingSample>& samples,
    const std::map<std::string, std::string>& passage_texts) {
  std::vector<TrainingSample> out(samples.begin(), samples.end());
  for (const auto& sample : samples) {
    for (std::size_t promoted = 0; promoted < sample.positives.size(); ++promoted) {
      if (sample.positives.size() == 1) {
        break;  // augmentation would leave zero positives
      }
      const auto text_it = passage_texts.find(sample.positives[promoted]);
      if (text_it == passage_texts.end()) {
        throw std::invalid_argument("no text for positive passage \"" +
                                    sample.positives[promoted] + "\"");
      }
      TrainingSample augmented;
      augmented.query_text = concat_query_passage(sample.query_text, text_it->second);
      for (std::size_t k = 0; k < sample.positives.size(); ++k) {
        if (k != promoted) {
          augmented.positives.push_back(sample.positives[k]);
        }
      }
      augmented.negatives = sample.negatives;
      out.push_back(std::move(augmented));
    }
  }
  return out;
}

std::size_t export_training_jsonl(const std::vector<TrainingSample>& samples,
                                  const std::filesystem::path& destination) {
  const std::filesystem::path tmp = destination.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    for (const auto& sample : samples) {
      out << Json{{"query", sample.query_text},
                  {"positives", sample.positives},
                  {"negatives", sample.negatives}}
                 .dump()
          << '\n';
    }
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, destination);
  return samples.size();
}

}  // namespace evipath
