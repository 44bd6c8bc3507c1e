// Copyright 2026 The BandSparse Authors
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


#ifndef BANDSPARSE_EXEC_H_
#define BANDSPARSE_EXEC_H_

namespace bandsparse {

// Execution policy for the row-parallel kernels. kSerial is the reference
// path and is bitwise deterministic. kParallel distributes rows over OpenMP
// threads; every kernel computes each output row with the same instruction
// sequence as the serial path, so results agree to within 1e-10 relative
// (in practice bitwise).
enum class Exec { kSerial, kParallel };

// Number of OpenMP threads kParallel will use (1 when built without OpenMP).
int parallel_threads();

}  // namespace bandsparse

#endif  // BANDSPARSE_EXEC_H_
