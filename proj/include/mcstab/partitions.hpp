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

/**
 * \file mcstab/partitions.hpp
 *
 * \brief Set-partition enumeration in restricted-growth-string order.
 */

#ifndef MCSTAB_PARTITIONS_HPP
#define MCSTAB_PARTITIONS_HPP

#include <mcstab/scenario.hpp>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mcstab {

namespace detail {

template <typename Visitor>
void partition_step(const std::vector<std::size_t>& items, std::size_t next,
                    std::vector<mask_type>& blocks, Visitor& visit)
{
	if (next == items.size())
	{
		visit(std::span<const mask_type>(blocks));
		return;
	}
	const mask_type bit = mask_type{1} << items[next];
	for (std::size_t b = 0; b < blocks.size(); ++b)
	{
		blocks[b] |= bit;
		partition_step(items, next + 1, blocks, visit);
		blocks[b] &= ~bit;
	}
	blocks.push_back(bit);
	partition_step(items, next + 1, blocks, visit);
	blocks.pop_back();
}

} // namespace detail

/**
 * Calls visit(span<const mask_type>) once per set partition of the users in
 * mask. Users are placed in increasing index order, each into an existing
 * block or a new one, so partitions arrive in lexicographic order of their
 * restricted growth strings and blocks are ordered by smallest member.
 * The empty mask has exactly one (empty) partition.
 */
template <typename Visitor>
void for_each_partition(mask_type mask, Visitor&& visit)
{
	std::vector<std::size_t> items;
	for (mask_type m = mask; m != 0; m &= m - 1)
	{
		items.push_back(static_cast<std::size_t>(std::countr_zero(m)));
	}
	std::vector<mask_type> blocks;
	blocks.reserve(items.size());
	detail::partition_step(items, 0, blocks, visit);
}

/// Bell number B(n); exact for n <= 25.
inline std::uint64_t bell_number(std::size_t n)
{
	std::vector<std::uint64_t> row{1};
	for (std::size_t i = 0; i < n; ++i)
	{
		std::vector<std::uint64_t> next{row.back()};
		for (std::uint64_t x : row)
		{
			next.push_back(next.back() + x);
		}
		row = std::move(next);
	}
	return row.front();
}

} // namespace mcstab

#endif // MCSTAB_PARTITIONS_HPP
