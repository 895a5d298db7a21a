// Copyright 2026 The vflsim Authors
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

// Trains an undefended split model on synthetic blobs, then measures how
// well the client can recover labels from its own bottom model with a
// 100-row auxiliary set. Repeats with LabObf on the host.

#include <cstdio>

#include "vflsim/attack.hpp"
#include "vflsim/dataflow.hpp"
#include "vflsim/defense.hpp"
#include "vflsim/splitnn.hpp"

int main() {
  using namespace vflsim;
  Rng rng(42);
  BlobParams blobs;
  blobs.n_per_class = 1000;
  VerticalDataset ds = AddRandomAttributes(SynthBlobs(blobs, rng), 200, rng);
  DatasetSplits splits = SplitTrainValidation(ds, 0.2, rng);
  AuxiliarySet aux = SampleAuxiliary(splits.train, 100, rng);

  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.optimizer = OptimizerKind::kAdam;
  cfg.learning_rate = 1e-2;
  AttackConfig attack;

  {
    PartyData train = MakePartyData(splits.train, false);
    PartyData val = MakePartyData(splits.validation, false);
    SplitModel model = MakeSplitModel(10, 10, 2, SplitArchitecture{}, rng);
    TrainHistory h = TrainPlain(model, train, &val, cfg);
    ShadowModel shadow = ModelCompletionAttack(model.client_spec, model.client,
                                               aux.client_features, aux.labels, 2, attack);
    AttackReport r = EvaluateAttack(shadow, val.client.features, val.host.labels, 2,
                                    aux.size(), AttackScenario::kRUpper);
    std::printf("plain : main %.3f  attack %.3f\n", h.validation_accuracy.back(),
                r.attack_top1);
  }
  {
    PartyData train = MakePartyData(splits.train, true);
    PartyData val = MakePartyData(splits.validation, true);
    SoftLabelMap map = GenerateSoftLabelMap(2, 2, rng);
    BinningRule rule = MakeBinningRule(200, 2);
    SplitModel model = MakeSplitModel(11, 11, 1, SplitArchitecture{}, rng);
    TrainConfig lcfg = cfg;
    lcfg.loss_mode = LossMode::kMseSoft;
    TrainHistory h = TrainLabObf(model, train, &val, map, rule, lcfg);
    ShadowModel shadow =
        ModelCompletionAttack(model.client_spec, model.client, AuxiliaryInputs(aux, true),
                              aux.labels, 2, attack);
    AttackReport r = EvaluateAttack(shadow, val.client.features, val.host.labels, 2,
                                    aux.size(), AttackScenario::kDefended);
    std::printf("labobf: main %.3f  attack %.3f\n", h.validation_accuracy.back(),
                r.attack_top1);
  }
  return 0;
}
