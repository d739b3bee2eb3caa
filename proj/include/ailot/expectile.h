// Copyright 2026 The AILOT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AILOT_EXPECTILE_H_
#define AILOT_EXPECTILE_H_

namespace ailot {

// Asymmetric weight |expectile - 1(advantage < 0)| of the expectile loss.
inline double ExpectileWeight(double expectile, double advantage) {
  return advantage < 0.0 ? 1.0 - expectile : expectile;
}

}  // namespace ailot

#endif  // AILOT_EXPECTILE_H_
