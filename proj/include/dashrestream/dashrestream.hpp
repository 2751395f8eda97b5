/*
 * Copyright 2026 The dashrestream Authors
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

#ifndef DASHRESTREAM_DASHRESTREAM_HPP
#define DASHRESTREAM_DASHRESTREAM_HPP

#include "dashrestream/acquire.hpp"
#include "dashrestream/assembly.hpp"
#include "dashrestream/cli.hpp"
#include "dashrestream/errors.hpp"
#include "dashrestream/log_io.hpp"
#include "dashrestream/logsynth.hpp"
#include "dashrestream/manifest.hpp"
#include "dashrestream/media.hpp"
#include "dashrestream/metrics.hpp"
#include "dashrestream/run_log.hpp"

#endif  // DASHRESTREAM_DASHRESTREAM_HPP
