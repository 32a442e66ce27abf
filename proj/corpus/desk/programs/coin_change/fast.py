class Solution:
    def coinChange(self, coins, amount):
        inf = amount + 1
        dp = [0] + [inf] * amount
        for a in range(1, amount + 1):
            for c in coins:
                if c <= a and dp[a - c] + 1 < dp[a]:
                    dp[a] = dp[a - c] + 1
        return -1 if dp[amount] == inf else dp[amount]
