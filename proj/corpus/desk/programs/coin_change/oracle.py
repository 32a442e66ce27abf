class Solution:
    def coinChange(self, coins, amount):
        best = -1

        def spend(i, left, used):
            nonlocal best
            if left == 0:
                if best == -1 or used < best:
                    best = used
                return
            if i == len(coins):
                return
            for k in range(left // coins[i] + 1):
                spend(i + 1, left - k * coins[i], used + k)

        spend(0, amount, 0)
        return best
