from django.db import models


class VerificationRun(models.Model):
    """A recorded invocation of the verify command"""

    version = models.CharField(max_length=20)
    selection = models.JSONField(default=list)
    seed = models.IntegerField(default=0)
    particles = models.PositiveSmallIntegerField(default=2)
    totals = models.JSONField(default=dict)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at"]

    def __str__(self):
        passed = self.totals.get("pass", 0)
        total = sum(self.totals.values())
        return f"run {self.pk}: {passed}/{total} pass ({self.created_at.strftime('%Y-%m-%d')})"

    @property
    def succeeded(self) -> bool:
        return not self.totals.get("fail") and not self.totals.get("error")


class CheckOutcome(models.Model):
    """Result of a single check inside a run"""

    run = models.ForeignKey(
        VerificationRun, on_delete=models.CASCADE, related_name="outcomes"
    )
    check_id = models.CharField(max_length=120)
    paper_ref = models.CharField(max_length=60)
    status = models.CharField(max_length=10)  # 'pass', 'fail', 'error'
    residual_terms = models.PositiveIntegerField(default=0)
    residual_text = models.TextField(blank=True)
    duration_ms = models.FloatField(default=0.0)

    class Meta:
        ordering = ["check_id"]

    def __str__(self):
        return f"{self.check_id}: {self.status}"
