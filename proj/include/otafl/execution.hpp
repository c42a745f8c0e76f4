/**
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OTAFL_EXECUTION_HPP_
#define OTAFL_EXECUTION_HPP_

namespace otafl {

// Selects between the OpenMP kernels and the serial reference path. Both
// produce bit-identical results because every replica owns its own engine
// and reductions run in index order.
enum class Execution { kSerial, kParallel };

}  // namespace otafl

#endif  // OTAFL_EXECUTION_HPP_
