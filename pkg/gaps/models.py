from django.db import models, transaction


class GapRun(models.Model):
    """Model to store a recorded gap vector computation."""
    STATUS = (
        ('pending', 'Pending'),
        ('processing', 'Processing'),
        ('completed', 'Completed'),
        ('failed', 'Failed'),
    )
    MODES = (
        ('qq', 'Exact rational'),
        ('fp', 'Prime field'),
    )

    variety_spec = models.CharField(max_length=255)
    label = models.CharField(max_length=255, blank=True)
    mode = models.CharField(max_length=2, choices=MODES)
    prime = models.BigIntegerField(null=True, blank=True)
    # Seeds are unsigned 64-bit and do not fit a signed BigIntegerField.
    seed = models.CharField(max_length=20)
    trials = models.PositiveIntegerField()
    margin = models.PositiveIntegerField()
    nested = models.BooleanField(default=False)
    status = models.CharField(max_length=20, choices=STATUS, default='pending')
    m = models.PositiveIntegerField(null=True, blank=True)
    d = models.PositiveIntegerField(null=True, blank=True)
    c = models.PositiveIntegerField(null=True, blank=True)
    epsilon = models.PositiveIntegerField(null=True, blank=True)
    gap = models.JSONField(default=list)
    variety_class = models.CharField(max_length=64, blank=True)
    error = models.TextField(blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.variety_spec} ({self.mode}, seed {self.seed}): {self.status}"

    def mark_failed(self, error):
        self.status = 'failed'
        self.error = str(error)
        self.save(update_fields=['status', 'error'])

    @transaction.atomic
    def store_report(self, report, checks, variety_class=None):
        """Attach a finished report, its faces and its checks."""
        self.label = report.label
        self.m, self.d, self.c = report.m, report.d, report.c
        self.epsilon = report.epsilon
        self.gap = list(report.gap)
        self.variety_class = variety_class.value if variety_class is not None else ''
        self.status = 'completed'
        self.save()
        FaceRecord.objects.bulk_create(
            FaceRecord(
                run=self,
                j=face.j,
                dim_sigma=face.dim_sigma,
                dim_P_formula=face.dim_P_formula,
                dim_B=face.dim_B,
                secant_nondefective=face.secant_nondefective,
                eps_Y=face.eps_Y,
                dim_IY2=face.dim_IY2,
            )
            for face in report.faces
        )
        CheckRecord.objects.bulk_create(
            CheckRecord(
                run=self,
                name=check.name,
                passed=check.passed,
                lhs=check.lhs,
                rhs=check.rhs,
                note=check.note,
                informational=check.informational,
            )
            for check in checks
        )


class FaceRecord(models.Model):
    """Model to store the dimensions of one face of a recorded run."""
    run = models.ForeignKey(GapRun, on_delete=models.CASCADE, related_name='faces')
    j = models.PositiveIntegerField()
    dim_sigma = models.IntegerField()
    dim_P_formula = models.IntegerField()
    dim_B = models.IntegerField()
    secant_nondefective = models.BooleanField()
    eps_Y = models.IntegerField()
    dim_IY2 = models.IntegerField()

    class Meta:
        ordering = ['run', 'j']

    def __str__(self):
        return f"j={self.j} of {self.run.variety_spec}"

    @property
    def gap(self):
        return self.dim_B - self.dim_sigma


class CheckRecord(models.Model):
    """Model to store one property check of a recorded run."""
    run = models.ForeignKey(GapRun, on_delete=models.CASCADE, related_name='checks')
    name = models.CharField(max_length=64)
    passed = models.BooleanField()
    lhs = models.JSONField(null=True, blank=True)
    rhs = models.JSONField(null=True, blank=True)
    note = models.TextField(blank=True)
    informational = models.BooleanField(default=False)

    def __str__(self):
        return f"{self.name}: {'passed' if self.passed else 'failed'}"
