/*
 * Copyright 2026 The mcstab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/// \file mcstab/mcstab.hpp
/// \brief Convenience header pulling in the whole library.

#ifndef MCSTAB_MCSTAB_HPP
#define MCSTAB_MCSTAB_HPP

#include <mcstab/core.hpp>
#include <mcstab/dc_stability.hpp>
#include <mcstab/errors.hpp>
#include <mcstab/experiments.hpp>
#include <mcstab/io.hpp>
#include <mcstab/lp.hpp>
#include <mcstab/partitions.hpp>
#include <mcstab/scenario.hpp>
#include <mcstab/value.hpp>

#endif // MCSTAB_MCSTAB_HPP
