#include <doctest.h>

#include <cmath>
#include <random>

#include "evipath/train_export.hpp"
#include "fixtures.hpp"

using namespace evipath;

namespace {

// Direct transcription in extended precision, no stabilization: safe for
// logits within +-50 because long double holds e^50 comfortably.
long double oracle_loss(const TrainingSample& sample,
                        const std::map<std::string, double>& sims) {
  long double loss = 0.0L;
  for (const auto& pos : sample.positives) {
    const long double sp = sims.at(pos);
    long double denom = expl(sp);
    for (const auto& neg : sample.negatives) {
      denom += expl(static_cast<long double>(sims.at(neg)));
    }
    loss += -logl(expl(sp) / denom);
  }
  return loss;
}

}  // namespace

TEST_CASE("no negatives means zero loss, exactly") {
  TrainingSample sample{"q", {"p1"}, {}};
  CHECK(contrastive_loss(sample, {{"p1", 3.7}}) == 0.0);
  CHECK(contrastive_loss(sample, {{"p1", -123.0}}) == 0.0);
}

TEST_CASE("tied logits give the closed form m*ln(1+n)") {
  TrainingSample sample{"q", {"a", "b"}, {"x", "y", "z"}};
  const std::map<std::string, double> sims{
      {"a", 1.5}, {"b", 1.5}, {"x", 1.5}, {"y", 1.5}, {"z", 1.5}};
  CHECK(contrastive_loss(sample, sims) ==
        doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("loss matches the high-precision oracle on random samples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> logit(-50.0, 50.0);
  std::uniform_int_distribution<int> m_dist(1, 5);
  std::uniform_int_distribution<int> n_dist(0, 10);

  for (int trial = 0; trial < 300; ++trial) {
    TrainingSample sample;
    sample.query_text = "q";
    std::map<std::string, double> sims;
    const int m = m_dist(rng);
    const int n = n_dist(rng);
    for (int k = 0; k < m; ++k) {
      sample.positives.push_back("p" + std::to_string(k));
      sims["p" + std::to_string(k)] = logit(rng);
    }
    for (int j = 0; j < n; ++j) {
      sample.negatives.push_back("n" + std::to_string(j));
      sims["n" + std::to_string(j)] = logit(rng);
    }
    const double got = contrastive_loss(sample, sims);
    const double want = static_cast<double>(oracle_loss(sample, sims));
    CHECK(std::isfinite(got));
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("loss is nonnegative and vanishes under domination") {
  TrainingSample sample{"q", {"p"}, {"n1", "n2"}};
  // every positive logit beats every negative by >= 40
  const std::map<std::string, double> sims{{"p", 45.0}, {"n1", 5.0}, {"n2", -10.0}};
  const double loss = contrastive_loss(sample, sims);
  CHECK(loss >= 0.0);
  CHECK(loss < 1e-15);
}

TEST_CASE("loss is monotone in each similarity") {
  TrainingSample sample{"q", {"p"}, {"n"}};
  const double base = contrastive_loss(sample, {{"p", 1.0}, {"n", 0.5}});
  // raising the negative raises the loss
  CHECK(contrastive_loss(sample, {{"p", 1.0}, {"n", 1.5}}) > base);
  // raising the positive lowers it
  CHECK(contrastive_loss(sample, {{"p", 2.0}, {"n", 0.5}}) < base);
}

TEST_CASE("missing similarity is an error") {
  TrainingSample sample{"q", {"p"}, {"n"}};
  CHECK_THROWS_AS(contrastive_loss(sample, {{"p", 1.0}}), std::invalid_argument);
}

TEST_CASE("huge logits neither overflow nor underflow") {
  TrainingSample sample{"q", {"p"}, {"n"}};
  const double a = contrastive_loss(sample, {{"p", 50.0}, {"n", -50.0}});
  const double b = contrastive_loss(sample, {{"p", -50.0}, {"n", 50.0}});
  CHECK(std::isfinite(a));
  CHECK(std::isfinite(b));
  CHECK(a >= 0.0);
  CHECK(b == doctest::Approx(100.0).epsilon(1e-9));  // -log(e^-100) with tiny correction
}

TEST_CASE("augmentation promotes each positive into the query") {
  const std::map<std::string, std::string> texts{
      {"p1", "alpha beta"}, {"p2", "gamma"}, {"p3", "delta"}};

  SUBCASE("m=2 adds two m=1 samples") {
    const std::vector<TrainingSample> input{{"q?", {"p1", "p2"}, {"n1"}}};
    const auto out = augment_training_set(input, texts);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == input[0]);
    CHECK(out[1] == TrainingSample{"q? alpha beta", {"p2"}, {"n1"}});
    CHECK(out[2] == TrainingSample{"q? gamma", {"p1"}, {"n1"}});
  }

  SUBCASE("m=1 yields the original only") {
    const std::vector<TrainingSample> input{{"q?", {"p1"}, {"n1", "n2"}}};
    const auto out = augment_training_set(input, texts);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == input[0]);
  }

  SUBCASE("m=3 augmented queries are byte-exact concatenations") {
    const std::vector<TrainingSample> input{{"Q", {"p1", "p2", "p3"}, {}}};
    const auto out = augment_training_set(input, texts);
    REQUIRE(out.size() == 4);
    CHECK(out[1].query_text == "Q alpha beta");
    CHECK(out[2].query_text == "Q gamma");
    CHECK(out[3].query_text == "Q delta");
    CHECK(out[1].positives == std::vector<std::string>{"p2", "p3"});
    CHECK(out[2].positives == std::vector<std::string>{"p1", "p3"});
    CHECK(out[3].positives == std::vector<std::string>{"p1", "p2"});
  }
}

TEST_CASE("augmentation conserves negatives and positives minus the promoted one") {
  std::mt19937_64 rng(55);
  std::vector<TrainingSample> input;
  std::map<std::string, std::string> texts;
  for (int s = 0; s < 10; ++s) {
    TrainingSample sample;
    sample.query_text = "query " + std::to_string(s);
    const int m = 1 + static_cast<int>(rng() % 4);
    const int n = static_cast<int>(rng() % 3);
    for (int k = 0; k < m; ++k) {
      const std::string pid = "s" + std::to_string(s) + "p" + std::to_string(k);
      sample.positives.push_back(pid);
      texts[pid] = "text " + pid;
    }
    for (int j = 0; j < n; ++j) {
      sample.negatives.push_back("s" + std::to_string(s) + "n" + std::to_string(j));
    }
    input.push_back(std::move(sample));
  }
  const auto out = augment_training_set(input, texts);

  std::size_t expected = input.size();
  for (const auto& sample : input) {
    if (sample.positives.size() > 1) {
      expected += sample.positives.size();
    }
  }
  CHECK(out.size() == expected);

  for (std::size_t i = input.size(); i < out.size(); ++i) {
    CHECK(!out[i].positives.empty());
    // negatives arrive verbatim from some original sample
    bool matched = false;
    for (const auto& original : input) {
      if (out[i].negatives == original.negatives &&
          out[i].query_text.rfind(original.query_text + " ", 0) == 0) {
        matched = true;
        // positives are the original's minus exactly one
        CHECK(out[i].positives.size() + 1 == original.positives.size());
        for (const auto& pid : out[i].positives) {
          CHECK(std::find(original.positives.begin(), original.positives.end(), pid) !=
                original.positives.end());
        }
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("export writes one record per sample, deterministically") {
  evitest::TempDir dir("export");
  const std::vector<TrainingSample> samples{
      {"q1", {"a"}, {"x"}}, {"q2", {"b", "c"}, {}}, {"q3", {"d"}, {"y", "z"}},
      {"q4", {"e"}, {}},    {"q5", {"f"}, {"w"}},
  };
  const auto file = dir.path() / "train.jsonl";
  CHECK(export_training_jsonl(samples, file) == 5);

  const std::string first = evitest::slurp(file);
  CHECK(std::count(first.begin(), first.end(), '\n') == 5);

  CHECK(export_training_jsonl(samples, file) == 5);
  CHECK(evitest::slurp(file) == first);  // byte-identical re-export

  CHECK(export_training_jsonl({}, dir.path() / "empty.jsonl") == 0);
  CHECK(evitest::slurp(dir.path() / "empty.jsonl").empty());
}

TEST_CASE("export failure leaves no partial file") {
  const std::vector<TrainingSample> samples{{"q", {"p"}, {}}};
  CHECK_THROWS(export_training_jsonl(samples, "/nonexistent_dir_xyz/out.jsonl"));
  CHECK(!std::filesystem::exists("/nonexistent_dir_xyz/out.jsonl.tmp"));
}
