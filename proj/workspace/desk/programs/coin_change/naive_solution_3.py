class Solution:
    def coinChange(self, coins, amount):
        inf = amount + 1
        dp = [0] + [inf] * amount
        for c in coins:
            for a in range(amount, c - 1, -1):
                dp[a] = min(dp[a], dp[a - c] + 1)
        return -1 if dp[amount] == inf else dp[amount]
