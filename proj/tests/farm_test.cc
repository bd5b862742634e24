/*
 * Copyright 2026 The PIA Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "pia/error.h"
#include "pia/farm.h"
#include "pia/records.h"
#include "pia/rng.h"
#include "pia/synthetic.h"

namespace pia {
namespace {

namespace fs = std::filesystem;

RecordSet SampleSet(std::size_t records) {
  const ArchitectureSpec spec = ReferenceArchitecture(ArchId::kA9, {3, 8, 8});
  RecordSet set;
  set.architecture_id = spec.id;
  set.parameter_count = ParameterCount(spec);
  set.boundaries = LayerBoundaries(spec);
  Rng rng(3);
  for (std::size_t i = 0; i < records; ++i) {
    ShadowRecord r;
    r.weights.resize(set.parameter_count);
    for (float& w : r.weights) w = static_cast<float>(rng.Normal());
    r.property_label = i % 2 == 0;
    r.accuracy = 0.5f + 0.01f * static_cast<float>(i);
    r.seed = rng.NextU64();
    set.records.push_back(std::move(r));
  }
  return set;
}

TEST(RecordsTest, EncodeDecodeRoundTrip) {
  const RecordSet set = SampleSet(5);
  const std::vector<std::uint8_t> bytes = EncodeRecords(set);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "PIA1");
  EXPECT_EQ(DecodeRecords(bytes), set);
}

TEST(RecordsTest, EncodedSizeMatchesLayout) {
  const RecordSet set = SampleSet(3);
  const std::size_t header = 4 + 4 + 2 + set.architecture_id.size() + 8 + 4 +
                             set.boundaries.size() * (4 + 1 + 8 + 8) + 8;
  const std::size_t per_record = 1 + 4 + 8 + 4 * set.parameter_count;
  EXPECT_EQ(EncodeRecords(set).size(), header + 3 * per_record);
}

TEST(RecordsTest, EveryTruncationIsFormatError) {
  const std::vector<std::uint8_t> bytes = EncodeRecords(SampleSet(2));
  for (std::size_t len = 0; len < bytes.size(); len += 7) {
    EXPECT_THROW(DecodeRecords(std::span(bytes.data(), len)), FormatError)
        << len;
  }
  EXPECT_THROW(DecodeRecords(std::span(bytes.data(), bytes.size() - 1)),
               FormatError);
}

TEST(RecordsTest, CorruptHeaderIsFormatError) {
  std::vector<std::uint8_t> bytes = EncodeRecords(SampleSet(1));
  std::vector<std::uint8_t> bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(DecodeRecords(bad), FormatError);
  bad = bytes;
  bad[4] = 9;  // version
  EXPECT_THROW(DecodeRecords(bad), FormatError);
  bad = bytes;
  bad.push_back(0);  // trailing garbage
  EXPECT_THROW(DecodeRecords(bad), FormatError);
}

TEST(RecordsTest, PersistLoadWithSidecar) {
  RecordSet set = SampleSet(4);
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    set.records[i].data_seed = 100 + i;
    set.records[i].retrain_count = static_cast<std::uint32_t>(i);
    set.records[i].resample_count = i == 3;
    set.records[i].property_proportion = 0.1 * static_cast<double>(i);
  }
  const fs::path dir = fs::path(testing::TempDir()) / "pia_records";
  fs::create_directories(dir);
  const std::string path = (dir / "a9.pia").string();
  PersistRecords(set, path);
  std::ofstream(path + ".provenance.json") << RecordProvenanceJson(set);

  RecordSet loaded = LoadRecords(path);
  EXPECT_EQ(loaded.records[2].retrain_count, 0u);  // binary file only
  AttachRecordProvenance(loaded, path + ".provenance.json");
  EXPECT_EQ(loaded, set);

  RecordSet no_sidecar = LoadRecords(path);
  AttachRecordProvenance(no_sidecar, (dir / "absent.json").string());
  EXPECT_EQ(no_sidecar.records.size(), 4u);
}

LabeledDataset SmallPool(std::size_t n, std::uint64_t seed) {
  SyntheticConfig c;
  c.image_size = 8;
  c.n = n;
  c.seed = seed;
  return GenerateSynthetic(c);
}

ShadowTrainConfig QuickTraining() {
  ShadowTrainConfig t;
  t.epochs = 2;
  t.accuracy_gate = 0.05;
  t.batch_size = 16;
  return t;
}

TEST(FarmTest, EvalSplitIsBalancedDisjointAndCapped) {
  const LabeledDataset pool = SmallPool(1500, 1);
  const EvalSplit s = CarveEvalSplit(pool, 40, 9);
  EXPECT_EQ(s.eval.size(), 1000u);
  EXPECT_EQ(s.eval.size() + s.train_pool.size(), pool.size());
  std::size_t open = 0;
  std::vector<bool> seen(pool.size(), false);
  for (std::size_t i : s.eval) {
    open += pool.task_labels()[i];
    seen[i] = true;
  }
  EXPECT_EQ(open, 500u);
  for (std::size_t i : s.train_pool) EXPECT_FALSE(seen[i]);
  // Pool barely larger than 2n: eval keeps |pool| - 2n items.
  EXPECT_EQ(CarveEvalSplit(SmallPool(100, 1), 40, 9).eval.size(), 20u);
  EXPECT_THROW(CarveEvalSplit(SmallPool(80, 1), 40, 9), SamplingError);
}

TEST(FarmTest, BalancedLabelsAndWeightsMatchArchitecture) {
  const LabeledDataset pool = SmallPool(1500, 2);
  FarmConfig farm;
  farm.architecture = ArchId::kA9;
  farm.input = {3, 8, 8};
  farm.shadow_count = 6;
  farm.shadow_dataset_size = 40;
  farm.master_seed = 5;
  std::size_t calls = 0;
  const RecordSet set = RunFarm(pool, farm, QuickTraining(), PropertySpec(),
                                [&](std::size_t done, std::size_t total) {
                                  ++calls;
                                  EXPECT_LE(done, total);
                                });
  EXPECT_EQ(calls, 6u);
  ASSERT_EQ(set.records.size(), 6u);
  EXPECT_EQ(set.parameter_count,
            ParameterCount(ReferenceArchitecture(ArchId::kA9, {3, 8, 8})));
  for (std::size_t i = 0; i < 6; ++i) {
    const ShadowRecord& r = set.records[i];
    EXPECT_EQ(r.property_label, i % 2 == 0 ? 1 : 0);
    EXPECT_EQ(r.property_proportion >= 0.7, r.property_label == 1);
    EXPECT_EQ(r.weights.size(), set.parameter_count);
    EXPECT_EQ(r.seed, ShadowInitSeed(5, i, r.retrain_count));
    EXPECT_EQ(r.data_seed, ShadowDataSeed(5, i, r.resample_count));
  }
}

TEST(FarmTest, OutputIndependentOfWorkerCount) {
  const LabeledDataset pool = SmallPool(1500, 3);
  FarmConfig farm;
  farm.architecture = ArchId::kA9;
  farm.input = {3, 8, 8};
  farm.shadow_count = 8;
  farm.shadow_dataset_size = 40;
  farm.master_seed = 11;
  farm.workers = 1;
  const RecordSet one = RunFarm(pool, farm, QuickTraining(), PropertySpec());
  farm.workers = 4;
  const RecordSet four = RunFarm(pool, farm, QuickTraining(), PropertySpec());
  EXPECT_EQ(one, four);
  EXPECT_EQ(EncodeRecords(one), EncodeRecords(four));
}

TEST(FarmTest, TrainShadowModelIsDeterministic) {
  const LabeledDataset pool = SmallPool(200, 4);
  std::vector<std::size_t> a(100), b(100);
  for (std::size_t i = 0; i < 100; ++i) {
    a[i] = i;
    b[i] = 100 + i;
  }
  const LabeledDataset train = pool.Subset(a), eval = pool.Subset(b);
  const TrainedShadow x =
      TrainShadowModel(train, ArchId::kA9, QuickTraining(), eval, 8);
  const TrainedShadow y =
      TrainShadowModel(train, ArchId::kA9, QuickTraining(), eval, 8);
  EXPECT_EQ(x.model.Flatten(), y.model.Flatten());
  EXPECT_EQ(x.accuracy, y.accuracy);
}

TEST(FarmTest, UnreachableGateIsFarmErrorNamingShadow) {
  // Task labels carry no information about the images.
  SyntheticConfig c;
  c.image_size = 8;
  c.n = 1200;
  const LabeledDataset base = GenerateSynthetic(c);
  std::vector<std::uint8_t> task(base.size());
  Rng rng(1);
  for (auto& t : task) t = rng.Bernoulli(0.5);
  const LabeledDataset pool(base.image_shape(), base.images(), task,
                            base.property_attrs(), Provenance::kSynthetic, 0);
  FarmConfig farm;
  farm.architecture = ArchId::kA9;
  farm.input = {3, 8, 8};
  farm.shadow_count = 2;
  farm.shadow_dataset_size = 30;
  ShadowTrainConfig t = QuickTraining();
  t.epochs = 1;
  t.accuracy_gate = 0.95;
  t.max_retrain_attempts = 1;
  try {
    RunFarm(pool, farm, t, PropertySpec());
    FAIL() << "expected FarmError";
  } catch (const FarmError& e) {
    EXPECT_EQ(e.shadow_index(), 0u);
    EXPECT_EQ(ExitCodeFor(e.category()), 3);
  }
}

TEST(FarmTest, ConfigValidation) {
  FarmConfig f;
  f.shadow_count = 3;
  EXPECT_THROW(f.Validate(), ConfigError);
  f.shadow_count = 240;
  f.workers = 0;
  EXPECT_THROW(f.Validate(), ConfigError);
  ShadowTrainConfig t;
  t.accuracy_gate = 1.0;
  EXPECT_THROW(t.Validate(), ConfigError);
}

}  // namespace
}  // namespace pia
