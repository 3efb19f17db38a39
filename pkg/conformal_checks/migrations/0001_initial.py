# Generated by Django 6.0 on 2026-10-19 09:14

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='VerificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('version', models.CharField(max_length=20)),
                ('selection', models.JSONField(default=list)),
                ('seed', models.IntegerField(default=0)),
                ('particles', models.PositiveSmallIntegerField(default=2)),
                ('totals', models.JSONField(default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='CheckOutcome',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('check_id', models.CharField(max_length=120)),
                ('paper_ref', models.CharField(max_length=60)),
                ('status', models.CharField(max_length=10)),
                ('residual_terms', models.PositiveIntegerField(default=0)),
                ('residual_text', models.TextField(blank=True)),
                ('duration_ms', models.FloatField(default=0.0)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='outcomes', to='conformal_checks.verificationrun')),
            ],
            options={
                'ordering': ['check_id'],
            },
        ),
    ]
